//! File ingestion and serialization.
//!
//! Three text formats, defined by this crate (no upstream format exists for
//! any of them):
//!
//! * point CSV — header `y,c,a`; one test instance per row;
//! * pair CSV — header `a_i,a_j,y_ij,c_ij` (judgment form) or
//!   `a_i,a_j,y_ij,s_i,s_j` (score form, `c_ij` derived as `sgn(s_i - s_j)`);
//! * distribution file — `p(c=_,y=_,a=_) = value` lines, one per cell,
//!   `#` comments allowed.

use std::io::{Read, Write};

use crate::data::{
    Group, GroupPair, JointDistribution, JudgedPair, LabeledPoint, Mode, PairLabel, PairPrediction,
    PairSet, PointSet, CELL_ORDER,
};
use crate::error::{Error, Result};

const POINT_HEADER: &str = "y,c,a";
const PAIR_HEADER_JUDGMENT: &str = "a_i,a_j,y_ij,c_ij";

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source)
}

fn parse_f64(record: &csv::StringRecord, idx: usize, name: &str, row: usize) -> Result<f64> {
    let raw = record.get(idx).unwrap_or("");
    raw.parse::<f64>().map_err(|_| Error::Row {
        row,
        message: format!("column `{name}`: cannot parse `{raw}` as a number"),
    })
}

fn parse_group(record: &csv::StringRecord, idx: usize, name: &str, row: usize) -> Result<Group> {
    let v = parse_f64(record, idx, name, row)?;
    if v == 0.0 {
        Ok(Group::Zero)
    } else if v == 1.0 {
        Ok(Group::One)
    } else {
        Err(Error::Row {
            row,
            message: format!("column `{name}`: unknown group value {v}, groups are 0 or 1"),
        })
    }
}

fn check_len(record: &csv::StringRecord, want: usize, row: usize) -> Result<()> {
    if record.len() != want {
        return Err(Error::Row {
            row,
            message: format!("expected {want} fields, got {}", record.len()),
        });
    }
    Ok(())
}

/// Loads a point CSV. Row order is preserved; in binary mode every label and
/// prediction must be 0/1.
pub fn load_point_set<R: Read>(source: R, mode: Mode) -> Result<PointSet> {
    let mut rdr = reader(source);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers.get(0) == Some("")) {
        return Err(Error::EmptyFile);
    }
    let found: Vec<&str> = headers.iter().collect();
    if found != ["y", "c", "a"] {
        return Err(Error::Header {
            expected: POINT_HEADER,
            found: found.join(","),
        });
    }

    let mut points = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record?;
        check_len(&record, 3, row)?;
        let y = parse_f64(&record, 0, "y", row)?;
        let c = parse_f64(&record, 1, "c", row)?;
        let a = parse_group(&record, 2, "a", row)?;
        if mode == Mode::Binary {
            if y != 0.0 && y != 1.0 {
                return Err(Error::Row {
                    row,
                    message: format!("non-binary label y={y} in binary mode"),
                });
            }
            if c != 0.0 && c != 1.0 {
                return Err(Error::Row {
                    row,
                    message: format!("non-binary prediction c={c} in binary mode"),
                });
            }
        } else if !y.is_finite() || !c.is_finite() {
            return Err(Error::Row {
                row,
                message: "labels must be finite".into(),
            });
        }
        points.push(LabeledPoint::new(y, c, a));
    }
    if points.is_empty() {
        return Err(Error::EmptyFile);
    }
    PointSet::new(points, mode)
}

/// Writes a point CSV that reloads to identical numeric content.
pub fn save_point_set<W: Write>(mut sink: W, set: &PointSet) -> Result<()> {
    writeln!(sink, "{POINT_HEADER}")?;
    for p in set.points() {
        writeln!(sink, "{},{},{}", p.y, p.c, p.a)?;
    }
    Ok(())
}

/// Loads a pair CSV in either judgment or score form.
///
/// Tied ground truth (`y_ij = 0`) is rejected: pair files carry decided
/// judgments only; tie discarding happens at pairing time, not load time.
/// In score form, `c_ij = sgn(s_i - s_j)` with `sgn(0) = 0`.
pub fn load_pair_set<R: Read>(source: R) -> Result<PairSet> {
    let mut rdr = reader(source);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers.get(0) == Some("")) {
        return Err(Error::EmptyFile);
    }
    let found: Vec<&str> = headers.iter().collect();
    let score_form = if found == ["a_i", "a_j", "y_ij", "c_ij"] {
        false
    } else if found == ["a_i", "a_j", "y_ij", "s_i", "s_j"] {
        true
    } else {
        return Err(Error::Header {
            expected: "`a_i,a_j,y_ij,c_ij` or `a_i,a_j,y_ij,s_i,s_j`",
            found: found.join(","),
        });
    };

    let mut pairs = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record?;
        check_len(&record, if score_form { 5 } else { 4 }, row)?;
        let a_i = parse_group(&record, 0, "a_i", row)?;
        let a_j = parse_group(&record, 1, "a_j", row)?;
        let y_raw = parse_f64(&record, 2, "y_ij", row)?;
        let label = if y_raw == 1.0 {
            PairLabel::Pos
        } else if y_raw == -1.0 {
            PairLabel::Neg
        } else if y_raw == 0.0 {
            return Err(Error::Row {
                row,
                message: "y_ij = 0 not allowed: pair files contain decided judgments".into(),
            });
        } else {
            return Err(Error::Row {
                row,
                message: format!("y_ij must be -1 or 1, got {y_raw}"),
            });
        };
        let prediction = if score_form {
            let s_i = parse_f64(&record, 3, "s_i", row)?;
            let s_j = parse_f64(&record, 4, "s_j", row)?;
            if !s_i.is_finite() || !s_j.is_finite() {
                return Err(Error::Row {
                    row,
                    message: "scores must be finite".into(),
                });
            }
            PairPrediction::from_sign_of(s_i - s_j)
        } else {
            let c_raw = parse_f64(&record, 3, "c_ij", row)?;
            if c_raw != -1.0 && c_raw != 0.0 && c_raw != 1.0 {
                return Err(Error::Row {
                    row,
                    message: format!("c_ij must be -1, 0 or 1, got {c_raw}"),
                });
            }
            PairPrediction::from_value(c_raw as i8).unwrap()
        };
        pairs.push(JudgedPair::new(GroupPair::new(a_i, a_j), label, prediction));
    }
    Ok(PairSet::new(pairs, 0))
}

/// Writes a pair CSV in judgment form. The discarded-ties count is pairing
/// metadata and has no representation in pair files.
pub fn save_pair_set<W: Write>(mut sink: W, set: &PairSet) -> Result<()> {
    writeln!(sink, "{PAIR_HEADER_JUDGMENT}")?;
    for p in set.pairs() {
        writeln!(
            sink,
            "{},{},{},{}",
            p.groups.first,
            p.groups.second,
            p.label.value(),
            p.prediction.value()
        )?;
    }
    Ok(())
}

fn dist_line_err(line: usize, message: impl Into<String>) -> Error {
    Error::Distribution(format!("line {line}: {}", message.into()))
}

/// Loads a distribution file: eight `p(c=_,y=_,a=_) = value` lines in any
/// order, each cell exactly once.
pub fn load_distribution<R: Read>(mut source: R) -> Result<JointDistribution> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    if text.trim().is_empty() {
        return Err(Error::EmptyFile);
    }

    let mut cells: [Option<f64>; 8] = [None; 8];
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let close = line
            .find(')')
            .ok_or_else(|| dist_line_err(lineno, "expected `p(c=_,y=_,a=_) = value`"))?;
        let (key, rest) = line.split_at(close + 1);
        let value_str = rest
            .trim_start()
            .strip_prefix('=')
            .ok_or_else(|| dist_line_err(lineno, "expected `=` after the cell key"))?
            .trim();
        let value: f64 = value_str.parse().map_err(|_| {
            dist_line_err(lineno, format!("cannot parse `{value_str}` as a number"))
        })?;

        let inner = key
            .trim()
            .strip_prefix("p(")
            .and_then(|k| k.strip_suffix(')'))
            .ok_or_else(|| dist_line_err(lineno, format!("bad cell key `{key}`")))?;
        let mut bits = [0u8; 3];
        let fields: Vec<&str> = inner.split(',').collect();
        if fields.len() != 3 {
            return Err(dist_line_err(lineno, format!("bad cell key `{key}`")));
        }
        for (slot, (field, name)) in fields.iter().zip(["c", "y", "a"]).enumerate() {
            let bit = field
                .trim()
                .strip_prefix(name)
                .and_then(|f| f.trim_start().strip_prefix('='))
                .map(str::trim)
                .and_then(|v| v.parse::<u8>().ok())
                .filter(|&b| b <= 1)
                .ok_or_else(|| {
                    dist_line_err(
                        lineno,
                        format!("bad cell key `{key}`, expected `{name}=0|1`"),
                    )
                })?;
            bits[slot] = bit;
        }
        let (c, y, a) = (bits[0], bits[1], bits[2]);
        let idx = CELL_ORDER
            .iter()
            .position(|&cell| cell == (c, y, a))
            .expect("all 8 bit patterns are in CELL_ORDER");
        if cells[idx].is_some() {
            return Err(dist_line_err(
                lineno,
                format!("duplicate cell p(c={c},y={y},a={a})"),
            ));
        }
        cells[idx] = Some(value);
    }

    let mut resolved = [0.0; 8];
    for (i, cell) in cells.iter().enumerate() {
        let (c, y, a) = CELL_ORDER[i];
        resolved[i] =
            cell.ok_or_else(|| Error::Distribution(format!("missing cell p(c={c},y={y},a={a})")))?;
    }
    JointDistribution::from_cells(resolved)
}

/// Writes a distribution file in canonical cell order.
pub fn save_distribution<W: Write>(mut sink: W, d: &JointDistribution) -> Result<()> {
    for (&(c, y, a), &v) in CELL_ORDER.iter().zip(d.cells().iter()) {
        writeln!(sink, "p(c={c},y={y},a={a}) = {v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fair_file() -> String {
        let cells = [0.220, 0.055, 0.090, 0.135, 0.180, 0.045, 0.110, 0.165];
        let d = JointDistribution::from_cells(cells).unwrap();
        let mut out = Vec::new();
        save_distribution(&mut out, &d).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn loads_binary_points() {
        let s = load_point_set("y,c,a\n1,1,1\n0,1,0".as_bytes(), Mode::Binary).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.points()[1], LabeledPoint::new(0.0, 1.0, Group::Zero));
    }

    #[test]
    fn rejects_non_binary_prediction_with_row_index() {
        let err = load_point_set("y,c,a\n1,2,1".as_bytes(), Mode::Binary).unwrap_err();
        match err {
            Error::Row { row, message } => {
                assert_eq!(row, 1);
                assert!(message.contains("non-binary prediction"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn loads_continuous_points() {
        let s = load_point_set("y,c,a\n5.0,4.5,0\n2.0,3.0,1".as_bytes(), Mode::Continuous).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.mode(), Mode::Continuous);
        assert_eq!(s.points()[0].y, 5.0);
    }

    #[test]
    fn empty_point_file_is_reported() {
        assert!(matches!(
            load_point_set("".as_bytes(), Mode::Binary),
            Err(Error::EmptyFile)
        ));
        assert!(matches!(
            load_point_set("y,c,a\n".as_bytes(), Mode::Binary),
            Err(Error::EmptyFile)
        ));
    }

    #[test]
    fn rejects_unknown_group() {
        let err = load_point_set("y,c,a\n1,1,2".as_bytes(), Mode::Binary).unwrap_err();
        assert!(err.to_string().contains("unknown group value"));
    }

    #[test]
    fn loads_judgment_pairs() {
        let sp = load_pair_set("a_i,a_j,y_ij,c_ij\n1,0,1,1".as_bytes()).unwrap();
        assert_eq!(sp.len(), 1);
        let p = sp.pairs()[0];
        assert_eq!(p.groups, GroupPair::new(Group::One, Group::Zero));
        assert_eq!(p.label, PairLabel::Pos);
        assert_eq!(p.prediction, PairPrediction::Pos);
    }

    #[test]
    fn score_form_derives_tied_prediction() {
        let sp = load_pair_set("a_i,a_j,y_ij,s_i,s_j\n0,1,-1,2.0,2.0".as_bytes()).unwrap();
        assert_eq!(sp.pairs()[0].prediction, PairPrediction::Tie);
        assert_eq!(sp.pairs()[0].label, PairLabel::Neg);
    }

    #[test]
    fn tied_ground_truth_is_rejected() {
        let err = load_pair_set("a_i,a_j,y_ij,c_ij\n1,1,0,1".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("y_ij = 0 not allowed"), "{err}");
    }

    #[test]
    fn mixed_pair_header_is_rejected() {
        let err = load_pair_set("a_i,a_j,y_ij,c_ij,s_i\n1,1,1,1,1".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Header { .. }));
    }

    #[test]
    fn point_round_trip_preserves_numeric_content() {
        let srcs = [
            ("y,c,a\n1,1,1\n0,1,0\n1,0,1\n0,0,0", Mode::Binary),
            ("y,c,a\n5.25,4.5,0\n-2.0,3.125,1", Mode::Continuous),
        ];
        for (src, mode) in srcs {
            let first = load_point_set(src.as_bytes(), mode).unwrap();
            let mut buf = Vec::new();
            save_point_set(&mut buf, &first).unwrap();
            let second = load_point_set(buf.as_slice(), mode).unwrap();
            assert_eq!(first, second);
        }
    }

    #[test]
    fn pair_round_trip_preserves_numeric_content() {
        let src = "a_i,a_j,y_ij,c_ij\n1,0,1,1\n0,1,-1,0\n1,1,-1,-1";
        let first = load_pair_set(src.as_bytes()).unwrap();
        let mut buf = Vec::new();
        save_pair_set(&mut buf, &first).unwrap();
        let second = load_pair_set(buf.as_slice()).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn distribution_round_trip() {
        let text = fair_file();
        let d = load_distribution(text.as_bytes()).unwrap();
        let mut buf = Vec::new();
        save_distribution(&mut buf, &d).unwrap();
        assert_eq!(text.as_bytes(), buf.as_slice());
        assert_eq!(d.cell(1, 1, 1), 0.220);
    }

    #[test]
    fn distribution_rejects_missing_and_perturbed_cells() {
        let text = fair_file();
        let missing: String = text.lines().skip(1).collect::<Vec<_>>().join("\n");
        let err = load_distribution(missing.as_bytes()).unwrap_err();
        assert!(
            err.to_string().contains("missing cell p(c=1,y=1,a=1)"),
            "{err}"
        );

        let perturbed = text.replace("0.22", "0.221");
        assert!(load_distribution(perturbed.as_bytes()).is_err());

        let negative = text.replace("= 0.22", "= -0.22");
        assert!(load_distribution(negative.as_bytes()).is_err());
    }

    #[test]
    fn distribution_rejects_duplicates() {
        let mut text = fair_file();
        text.push_str("p(c=1,y=1,a=1) = 0.0\n");
        let err = load_distribution(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("duplicate cell"), "{err}");
    }

    #[test]
    fn distribution_accepts_comments_and_any_order() {
        let text = "# a comment\np(c=0,y=0,a=0) = 0.125\np(c=1,y=1,a=1) = 0.125\n\
                    p(c=0,y=1,a=1) = 0.125\np(c=1,y=0,a=1) = 0.125\np(c=0,y=0,a=1) = 0.125\n\
                    p(c=1,y=1,a=0) = 0.125\np(c=0,y=1,a=0) = 0.125\np(c=1,y=0,a=0) = 0.125\n";
        let d = load_distribution(text.as_bytes()).unwrap();
        assert_eq!(d.cell(0, 0, 0), 0.125);
    }
}
