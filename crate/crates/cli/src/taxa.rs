//! Tab-separated taxon maps: one `label<TAB>name` pair per line.
//!
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use coconvex_core::Label;

use crate::error::{Result, ToolError};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TaxonMap {
    by_name: BTreeMap<String, Label>,
    by_label: BTreeMap<Label, String>,
}

impl TaxonMap {
    pub fn parse(text: &str) -> Result<TaxonMap> {
        let mut map = TaxonMap::default();
        for (i, line) in text.lines().enumerate() {
            let err = |message: String| ToolError::Taxa { line: i + 1, message };
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (label, name) = line
                .split_once('\t')
                .ok_or_else(|| err("expected label<TAB>name".into()))?;
            let label: Label = label
                .trim()
                .parse()
                .map_err(|_| err(format!("label {label:?} is not a positive integer")))?;
            if label == 0 {
                return Err(err("labels start at 1".into()));
            }
            map.insert(label, name.trim().to_string()).map_err(err)?;
        }
        Ok(map)
    }

    pub fn read(path: &Path) -> Result<TaxonMap> {
        TaxonMap::parse(&fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?)
    }

    /// Labels `1..` assigned to `names` in sorted order.
    pub fn from_names<'a, I: IntoIterator<Item = &'a str>>(names: I) -> TaxonMap {
        let sorted: std::collections::BTreeSet<&str> = names.into_iter().collect();
        let mut map = TaxonMap::default();
        for (i, name) in sorted.into_iter().enumerate() {
            map.insert(i as Label + 1, name.to_string()).expect("names are distinct");
        }
        map
    }

    fn insert(&mut self, label: Label, name: String) -> std::result::Result<(), String> {
        if name.is_empty() {
            return Err("empty taxon name".into());
        }
        if self.by_label.contains_key(&label) {
            return Err(format!("label {label} listed twice"));
        }
        if self.by_name.contains_key(&name) {
            return Err(format!("name {name:?} listed twice"));
        }
        self.by_name.insert(name.clone(), label);
        self.by_label.insert(label, name);
        Ok(())
    }

    pub fn label(&self, name: &str) -> Option<Label> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, label: Label) -> Option<&str> {
        self.by_label.get(&label).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_label.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (label, name) in &self.by_label {
            writeln!(out, "{label}\t{name}").unwrap();
        }
        out
    }
}
