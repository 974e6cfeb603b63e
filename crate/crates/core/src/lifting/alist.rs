//! The alist sparse-matrix format (1-based indices, zero padding).

use std::collections::BTreeSet;

use thiserror::Error;

use super::ParityCheckMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlistError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn err(line: usize, message: impl Into<String>) -> AlistError {
    AlistError::Parse {
        line,
        message: message.into(),
    }
}

fn join(values: impl IntoIterator<Item = usize>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn export_alist(h: &ParityCheckMatrix) -> String {
    let (n, m) = (h.ncols(), h.nrows());
    let max_col = (0..n).map(|c| h.col(c).len()).max().unwrap_or(0);
    let max_row = (0..m).map(|r| h.row(r).len()).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n{max_col} {max_row}\n"));
    out.push_str(&join((0..n).map(|c| h.col(c).len())));
    out.push('\n');
    out.push_str(&join((0..m).map(|r| h.row(r).len())));
    out.push('\n');
    for c in 0..n {
        let col = h.col(c);
        let padded = col
            .iter()
            .map(|&r| r + 1)
            .chain(std::iter::repeat_n(0, max_col - col.len()));
        out.push_str(&join(padded));
        out.push('\n');
    }
    for r in 0..m {
        let row = h.row(r);
        let padded = row
            .iter()
            .map(|&c| c + 1)
            .chain(std::iter::repeat_n(0, max_row - row.len()));
        out.push_str(&join(padded));
        out.push('\n');
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self, expected: usize) -> Result<(usize, Vec<usize>), AlistError> {
        let (i, line) = self
            .inner
            .next()
            .ok_or_else(|| err(self.last + 1, "unexpected end of file"))?;
        let line_no = i + 1;
        self.last = line_no;
        let values = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| err(line_no, format!("invalid integer `{t}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != expected {
            return Err(err(
                line_no,
                format!("expected {expected} values, found {}", values.len()),
            ));
        }
        Ok((line_no, values))
    }
}

fn read_lists(
    lines: &mut Lines<'_>,
    degrees: &[usize],
    max_degree: usize,
    bound: usize,
) -> Result<Vec<(usize, Vec<usize>)>, AlistError> {
    let mut lists = Vec::with_capacity(degrees.len());
    for &degree in degrees {
        let (line_no, values) = lines.next_numbers(max_degree)?;
        let (used, padding) = values.split_at(degree);
        if padding.iter().any(|&v| v != 0) {
            return Err(err(line_no, "nonzero entry beyond the declared degree"));
        }
        let mut seen = BTreeSet::new();
        for &v in used {
            if v == 0 || v > bound {
                return Err(err(line_no, format!("index {v} outside 1..={bound}")));
            }
            if !seen.insert(v - 1) {
                return Err(err(line_no, format!("index {v} repeated")));
            }
        }
        lists.push((line_no, seen.into_iter().collect()));
    }
    Ok(lists)
}

/// Parses an alist document; column and row lists must agree.
pub fn import_alist(text: &str) -> Result<ParityCheckMatrix, AlistError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (_, dims) = lines.next_numbers(2)?;
    let (n, m) = (dims[0], dims[1]);
    let (degree_line, maxes) = lines.next_numbers(2)?;
    let (max_col, max_row) = (maxes[0], maxes[1]);
    let (_, col_degrees) = lines.next_numbers(n)?;
    let (_, row_degrees) = lines.next_numbers(m)?;
    if col_degrees.iter().copied().max().unwrap_or(0) != max_col {
        return Err(err(degree_line, "maximum column degree disagrees with the list"));
    }
    if row_degrees.iter().copied().max().unwrap_or(0) != max_row {
        return Err(err(degree_line, "maximum row degree disagrees with the list"));
    }
    let cols = read_lists(&mut lines, &col_degrees, max_col, m)?;
    let rows = read_lists(&mut lines, &row_degrees, max_row, n)?;
    for (i, l) in lines.inner.by_ref() {
        if !l.trim().is_empty() {
            return Err(err(i + 1, "trailing content"));
        }
    }
    let h = ParityCheckMatrix::from_ones(
        m,
        n,
        rows.iter()
            .enumerate()
            .flat_map(|(r, (_, cs))| cs.iter().map(move |&c| (r, c))),
    );
    for (c, (line_no, rs)) in cols.iter().enumerate() {
        if h.col(c) != rs.as_slice() {
            return Err(err(*line_no, format!("column {} disagrees with the row lists", c + 1)));
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Permutation;
    use crate::lifting::{canonical_from_mapping, lift, ShiftMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn array_code_5() -> ParityCheckMatrix {
        let p = Permutation::new(vec![0, 2, 4, 1, 3]).unwrap();
        lift(&canonical_from_mapping(&p).unwrap())
    }

    #[test]
    fn regular_header() {
        let text = export_alist(&array_code_5());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "25 15");
        assert_eq!(lines[1], "3 5");
        assert_eq!(lines[2], vec!["3"; 25].join(" "));
        assert_eq!(lines[3], vec!["5"; 15].join(" "));
        assert_eq!(lines.len(), 4 + 25 + 15);
        // column 0 of the lifted code meets check rows 0, 5 and 10
        assert_eq!(lines[4], "1 6 11");
    }

    #[test]
    fn exact_small_document() {
        let h = ParityCheckMatrix::from_ones(2, 3, [(0, 0), (0, 2), (1, 1), (1, 2)]);
        let text = export_alist(&h);
        assert_eq!(text, "3 2\n2 2\n1 1 2\n2 2\n1 0\n2 0\n1 2\n1 3\n2 3\n");
        assert_eq!(import_alist(&text).unwrap(), h);
    }

    #[test]
    fn random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let (m, n) = (rng.gen_range(1..12), rng.gen_range(1..12));
            let ones: Vec<_> = (0..rng.gen_range(0..40))
                .map(|_| (rng.gen_range(0..m), rng.gen_range(0..n)))
                .collect();
            let h = ParityCheckMatrix::from_ones(m, n, ones);
            assert_eq!(import_alist(&export_alist(&h)).unwrap(), h);
        }
        let shifts = ShiftMatrix::from_rows(7, &[[0, 1, 3], [0, 4, 2]]).unwrap();
        let h = lift(&shifts);
        assert_eq!(import_alist(&export_alist(&h)).unwrap(), h);
    }

    #[test]
    fn truncated_file_reports_line() {
        let text = export_alist(&array_code_5());
        let truncated: String = text.lines().take(20).map(|l| format!("{l}\n")).collect();
        assert_eq!(
            import_alist(&truncated),
            Err(AlistError::Parse {
                line: 21,
                message: "unexpected end of file".into()
            })
        );
        let cut_mid_line = text.lines().take(19).collect::<Vec<_>>().join("\n") + "\n1 6";
        assert!(matches!(
            import_alist(&cut_mid_line),
            Err(AlistError::Parse { line: 20, .. })
        ));
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(import_alist(""), Err(AlistError::Parse { line: 1, .. })));
        assert!(matches!(import_alist("3 x\n"), Err(AlistError::Parse { line: 1, .. })));
        // column list disagrees with the row lists
        let bad = "3 2\n2 2\n1 1 2\n2 2\n2 0\n2 0\n1 2\n1 3\n2 3\n";
        assert!(matches!(import_alist(bad), Err(AlistError::Parse { line: 5, .. })));
        let out_of_range = "3 2\n2 2\n1 1 2\n2 2\n1 0\n2 0\n1 2\n1 4\n2 3\n";
        assert!(matches!(
            import_alist(out_of_range),
            Err(AlistError::Parse { line: 8, .. })
        ));
    }
}
