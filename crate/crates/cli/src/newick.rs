//! Newick reading and writing for unrooted binary trees.
//!
//! Accepted: nested parentheses, quoted or bare leaf names, branch lengths
//! (parsed and discarded), `[...]` comments, several trees per file. A
//! bifurcating root is suppressed. Internal node labels are rejected.
//!
//! Leaf names are mapped to labels by a taxon map when one is given, read as
//! integers when every name is a positive integer, and otherwise numbered in
//! sorted name order.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use coconvex_core::{Label, Tree};

use crate::error::{Result, ToolError};
use crate::taxa::TaxonMap;

/// A parsed tree before names are resolved to labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTree {
    pub names: Vec<Option<String>>,
    pub edges: Vec<(usize, usize)>,
}

impl RawTree {
    pub fn leaf_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().flatten().map(String::as_str)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

const SPECIAL: &[u8] = b"()[]':;,";

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(ToolError::Newick {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip(&mut self) -> Result<()> {
        while self.pos < self.s.len() {
            match self.s[self.pos] {
                b' ' | b'\t' | b'\n' | b'\r' => self.pos += 1,
                b'[' => match self.s[self.pos..].iter().position(|&c| c == b']') {
                    Some(end) => self.pos += end + 1,
                    None => return self.err("unterminated comment"),
                },
                _ => break,
            }
        }
        Ok(())
    }

    fn peek(&mut self) -> Result<Option<u8>> {
        self.skip()?;
        Ok(self.s.get(self.pos).copied())
    }

    fn label(&mut self) -> Result<Option<String>> {
        self.skip()?;
        if self.s.get(self.pos) == Some(&b'\'') {
            let mut out = Vec::new();
            self.pos += 1;
            loop {
                match self.s.get(self.pos) {
                    None => return self.err("unterminated quoted name"),
                    Some(b'\'') if self.s.get(self.pos + 1) == Some(&b'\'') => {
                        out.push(b'\'');
                        self.pos += 2;
                    }
                    Some(b'\'') => {
                        self.pos += 1;
                        break;
                    }
                    Some(&c) => {
                        out.push(c);
                        self.pos += 1;
                    }
                }
            }
            return match String::from_utf8(out) {
                Ok(s) => Ok(Some(s)),
                Err(_) => self.err("name is not UTF-8"),
            };
        }
        let start = self.pos;
        while let Some(&c) = self.s.get(self.pos) {
            if SPECIAL.contains(&c) || c.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        match std::str::from_utf8(&self.s[start..self.pos]) {
            Ok(s) => Ok(Some(s.to_string())),
            Err(_) => self.err("name is not UTF-8"),
        }
    }

    fn branch_length(&mut self) -> Result<()> {
        if self.peek()? != Some(b':') {
            return Ok(());
        }
        self.pos += 1;
        self.skip()?;
        let start = self.pos;
        while let Some(&c) = self.s.get(self.pos) {
            if c.is_ascii_digit() || b"+-.eE".contains(&c) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        if text.parse::<f64>().is_err() {
            return self.err(format!("bad branch length {text:?}"));
        }
        Ok(())
    }

    fn tree(&mut self) -> Result<RawTree> {
        let mut raw = RawTree {
            names: Vec::new(),
            edges: Vec::new(),
        };
        let mut stack: Vec<usize> = Vec::new();
        let attach = |raw: &mut RawTree, stack: &[usize], name: Option<String>| {
            let v = raw.names.len();
            raw.names.push(name);
            if let Some(&p) = stack.last() {
                raw.edges.push((p, v));
            }
            v
        };
        loop {
            // start of a node
            if self.peek()? == Some(b'(') {
                self.pos += 1;
                let v = attach(&mut raw, &stack, None);
                stack.push(v);
                continue;
            }
            match self.label()? {
                Some(name) => {
                    attach(&mut raw, &stack, Some(name));
                }
                None => return self.err("expected a leaf name or '('"),
            }
            self.branch_length()?;
            // after a node
            loop {
                match self.peek()? {
                    Some(b',') if !stack.is_empty() => {
                        self.pos += 1;
                        break;
                    }
                    Some(b')') if !stack.is_empty() => {
                        self.pos += 1;
                        stack.pop();
                        if self.label()?.is_some() {
                            return self.err("internal node labels are not supported");
                        }
                        self.branch_length()?;
                    }
                    Some(b';') if stack.is_empty() => {
                        self.pos += 1;
                        return Ok(raw);
                    }
                    None => return self.err("missing ';'"),
                    Some(c) => return self.err(format!("unexpected {:?}", c as char)),
                }
            }
        }
    }
}

/// Parses every tree in `text`.
pub fn parse_raw(text: &str) -> Result<Vec<RawTree>> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    while p.peek()?.is_some() {
        out.push(p.tree()?);
    }
    if out.is_empty() {
        return p.err("no trees");
    }
    Ok(out)
}

/// Trees with resolved labels, and the taxon map used when names were not
/// integers.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub trees: Vec<Tree>,
    pub taxa: Option<TaxonMap>,
}

pub fn resolve(raw: &[RawTree], taxa: Option<&TaxonMap>) -> Result<Loaded> {
    let names: BTreeSet<&str> = raw.iter().flat_map(RawTree::leaf_names).collect();
    let numeric = names.iter().all(|n| n.parse::<Label>().is_ok_and(|l| l > 0));
    let map = match taxa {
        Some(m) => Some(m.clone()),
        None if numeric => None,
        None => Some(TaxonMap::from_names(names.iter().copied())),
    };
    let mut trees = Vec::with_capacity(raw.len());
    for (i, t) in raw.iter().enumerate() {
        let mut labels = Vec::with_capacity(t.names.len());
        for name in &t.names {
            labels.push(match name {
                None => None,
                Some(n) => Some(match &map {
                    Some(m) => m
                        .label(n)
                        .ok_or_else(|| ToolError::Usage(format!("tree {}: name {n:?} is not in the taxon map", i + 1)))?,
                    None => n.parse::<Label>().expect("checked numeric"),
                }),
            });
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = labels.iter().flatten().find(|l| !seen.insert(**l)) {
            return Err(ToolError::Usage(format!("tree {}: leaf {dup} appears twice", i + 1)));
        }
        trees.push(Tree::from_labeled_graph(&labels, &t.edges)?);
    }
    Ok(Loaded { trees, taxa: map })
}

pub fn parse_trees(text: &str, taxa: Option<&TaxonMap>) -> Result<Loaded> {
    resolve(&parse_raw(text)?, taxa)
}

pub fn read_trees(path: &Path, taxa: Option<&TaxonMap>) -> Result<Loaded> {
    parse_trees(&fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?, taxa)
}

fn quote(name: &str) -> String {
    let plain = !name.is_empty() && name.bytes().all(|c| !SPECIAL.contains(&c) && !c.is_ascii_whitespace());
    if plain {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\'', "''"))
    }
}

/// Newick text with the root at the neighbor of the smallest label and
/// subtrees ordered by their smallest label.
pub fn write_tree(tree: &Tree, taxa: Option<&TaxonMap>) -> String {
    let name = |v: usize| {
        let l = tree.labels()[v];
        quote(&taxa.and_then(|m| m.name(l)).map_or_else(|| l.to_string(), str::to_string))
    };
    fn sub(tree: &Tree, v: usize, from: usize, name: &dyn Fn(usize) -> String) -> (usize, String) {
        if tree.is_leaf(v) {
            return (v, name(v));
        }
        let mut parts: Vec<(usize, String)> = tree
            .neighbors(v)
            .iter()
            .filter(|&&w| w != from)
            .map(|&w| sub(tree, w, v, name))
            .collect();
        parts.sort();
        let min = parts[0].0;
        let body: Vec<String> = parts.into_iter().map(|p| p.1).collect();
        (min, format!("({})", body.join(",")))
    }
    match tree.n() {
        1 => format!("{};", name(0)),
        2 => format!("({},{});", name(0), name(1)),
        _ => {
            let root = tree.neighbors(0)[0];
            let (_, s) = sub(tree, root, usize::MAX, &name);
            format!("{s};")
        }
    }
}
