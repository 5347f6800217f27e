//! Partition list files: one partition per line in the `1,2|3|4,5` text
//! form. Blank lines and `#` comments are skipped on reading.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use coconvex_core::partition::parse_partition;
use coconvex_core::Partition;

use crate::error::{Result, ToolError};

pub fn read_partitions(path: &Path, n: Option<usize>) -> Result<Vec<Partition>> {
    let file = File::open(path).map_err(|e| ToolError::io(path, e))?;
    parse_lines(BufReader::new(file), n).map_err(|e| match e {
        ToolError::Usage(m) => ToolError::Usage(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_lines<R: BufRead>(reader: R, n: Option<usize>) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ToolError::Usage(format!("line {}: {e}", i + 1)))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p = parse_partition(line, n).map_err(|e| ToolError::Usage(format!("line {}: {e}", i + 1)))?;
        out.push(p);
    }
    Ok(out)
}

/// Writes every partition of `items`, one per line, and returns the count.
pub fn write_partitions<W: Write, I: IntoIterator<Item = Partition>>(out: W, items: I) -> std::io::Result<u64> {
    let mut w = BufWriter::new(out);
    let mut count = 0;
    for p in items {
        writeln!(w, "{p}")?;
        count += 1;
    }
    w.flush()?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# shared characters\n1,2|3|4,5\n\n1|2,3,4,5\n";
        let ps = parse_lines(text.as_bytes(), Some(5)).unwrap();
        assert_eq!(ps.len(), 2);
        let mut buf = Vec::new();
        assert_eq!(write_partitions(&mut buf, ps.clone()).unwrap(), 2);
        assert_eq!(String::from_utf8(buf).unwrap(), "1,2|3|4,5\n1|2,3,4,5\n");
    }

    #[test]
    fn reports_the_line() {
        let err = parse_lines("1|2\n1,1|2\n".as_bytes(), None).unwrap_err();
        assert!(err.to_string().starts_with("line 2"), "{err}");
        assert!(parse_lines("1,2|3\n".as_bytes(), Some(4)).is_err());
    }
}
