//! LibSVM / SVMlight text format: `label idx:val idx:val ...` with 1-based
//! indices. Labels in {0, 1} are remapped to {-1, +1}.

use std::io::{BufRead, Write};

use super::SparseDataset;
use crate::error::{Error, Result};

/// Parses a LibSVM stream. When `dim` is `None` the dimension is the largest
/// index seen.
pub fn read<R: BufRead>(reader: R, dim: Option<usize>) -> Result<SparseDataset> {
    let mut rows = Vec::new();
    let mut raw_labels = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        // trailing comments are allowed by SVMlight
        let line = line.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().ok_or_else(|| Error::Parse {
            line: lineno,
            msg: "missing label".into(),
        })?;
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad label {label_tok:?}"),
        })?;
        let mut row = Vec::new();
        for tok in tokens {
            let (i, v) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected idx:val, got {tok:?}"),
            })?;
            let i: usize = i.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad index {i:?}"),
            })?;
            if i == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "indices are 1-based".into(),
                });
            }
            let v: f64 = v.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad value {v:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("non-finite value at index {i}"),
                });
            }
            max_index = max_index.max(i);
            row.push((i - 1, v));
        }
        rows.push((lineno, row));
        raw_labels.push((lineno, label));
    }

    let zero_one = raw_labels.iter().all(|&(_, y)| y == 0.0 || y == 1.0);
    let mut labels = Vec::with_capacity(raw_labels.len());
    for (lineno, y) in raw_labels {
        let mapped = if zero_one {
            if y == 0.0 {
                -1.0
            } else {
                1.0
            }
        } else if y == 1.0 || y == -1.0 {
            y
        } else {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("label {y} is not in {{-1, +1}} or {{0, 1}}"),
            });
        };
        labels.push(mapped);
    }

    let dim = match dim {
        Some(d) if d < max_index => {
            return Err(Error::Input(format!(
                "feature index {max_index} exceeds requested dimension {d}"
            )))
        }
        Some(d) => d,
        None => max_index,
    };
    let rows: Vec<_> = rows.into_iter().map(|(_, r)| r).collect();
    SparseDataset::from_rows(rows, labels, dim)
}

pub fn read_path(path: &std::path::Path, dim: Option<usize>) -> Result<SparseDataset> {
    let file = std::fs::File::open(path)?;
    read(std::io::BufReader::new(file), dim)
}

pub fn write<W: Write>(data: &SparseDataset, mut w: W) -> Result<()> {
    for i in 0..data.len() {
        let y = data.label(i);
        write!(w, "{}", if y > 0.0 { "+1" } else { "-1" })?;
        let (idx, val) = data.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            // `{:?}` prints the shortest representation that round-trips
            write!(w, " {}:{:?}", j + 1, v)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_remaps() {
        let text = "# header\n1 1:0.5 3:2\n0 2:-1\n\n";
        let d = read(text.as_bytes(), None).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.dim(), 3);
        assert_eq!(d.labels(), &[1.0, -1.0]);
        assert_eq!(d.row(0), (&[0usize, 2][..], &[0.5, 2.0][..]));
    }

    #[test]
    fn malformed_line_reports_number() {
        let text = "+1 1:0.5\n-1 2=3\n";
        match read(text.as_bytes(), None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match read("+1 0:1\n".as_bytes(), None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match read("+1 1:1\n2 1:1\n".as_bytes(), None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn write_then_read() {
        let d = SparseDataset::from_rows(
            vec![vec![(0, 0.1), (4, -3.5)], vec![(2, 1e-7)]],
            vec![1.0, -1.0],
            5,
        )
        .unwrap();
        let mut buf = Vec::new();
        write(&d, &mut buf).unwrap();
        let back = read(buf.as_slice(), Some(5)).unwrap();
        assert_eq!(back, d);
    }
}
