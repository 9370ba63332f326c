//! Fixture file format and runner for the table regressions.
//!
//! A fixture file is a JSON array of rows
//! `{"id", "fn", "input", "iota"?, "expect", "note"?, "paper"?}`.
//! `input` is a comma-separated alternating word for the liberation
//! functions, or `"t1,t2,...; a1,a2,..."` for the timed-word functions.
//! Rows annotated `"note": "paper-typo"` carry the printed (garbled) source
//! string in `paper` for audit; their `expect` is the oracle-certified
//! value.

use crate::dilation::{self, DiachronicKind, TimeVec, TimedWord};
use crate::ir::{canonical_text, parse, parse_rat, Expr};
use crate::liberation::{self, CollapseKind, LWord, MomentKind, RWord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("row {id}: {msg}")]
    Row { id: String, msg: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureRow {
    pub id: String,
    #[serde(rename = "fn")]
    pub func: String,
    pub input: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iota: Option<Vec<usize>>,
    pub expect: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paper: Option<String>,
}

impl FixtureRow {
    pub fn is_paper_typo(&self) -> bool {
        self.note.as_deref() == Some("paper-typo")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RowResult {
    pub id: String,
    pub pass: bool,
    pub got: String,
    pub expect: String,
    pub paper_typo: bool,
}

fn row_err(id: &str, msg: impl Into<String>) -> FixtureError {
    FixtureError::Row { id: id.to_string(), msg: msg.into() }
}

/// Parses `"b0, a1, b1"` into alternating entries.
fn parse_tuple(id: &str, s: &str) -> Result<Vec<Expr>, FixtureError> {
    s.split(',')
        .map(|p| parse(p.trim()).map_err(|e| row_err(id, format!("bad tuple entry `{p}`: {e}"))))
        .collect()
}

fn to_rword(id: &str, entries: Vec<Expr>) -> Result<RWord, FixtureError> {
    if entries.len() % 2 == 0 {
        return Err(row_err(id, "right word needs an odd number of entries"));
    }
    let mut b = Vec::new();
    let mut a = Vec::new();
    for (k, e) in entries.into_iter().enumerate() {
        if k % 2 == 0 {
            b.push(e);
        } else {
            a.push(e);
        }
    }
    RWord::new(b, a).map_err(|e| row_err(id, e.to_string()))
}

fn to_lword(id: &str, entries: Vec<Expr>) -> Result<LWord, FixtureError> {
    if entries.len() % 2 == 0 {
        return Err(row_err(id, "left word needs an odd number of entries"));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (k, e) in entries.into_iter().enumerate() {
        if k % 2 == 0 {
            a.push(e);
        } else {
            b.push(e);
        }
    }
    LWord::new(a, b).map_err(|e| row_err(id, e.to_string()))
}

pub fn parse_timed_input(id: &str, s: &str) -> Result<TimedWord, FixtureError> {
    let (ts, ls) = s
        .split_once(';')
        .ok_or_else(|| row_err(id, "timed input must be `t1,t2,...; a1,a2,...`"))?;
    let times: Result<Vec<_>, _> = ts.split(',').map(|p| parse_rat(p.trim())).collect();
    let times = times.map_err(|e| row_err(id, format!("bad time: {e}")))?;
    let letters = parse_tuple(id, ls)?;
    let tv = TimeVec::new(times).map_err(|e| row_err(id, e.to_string()))?;
    TimedWord::new(tv, letters).map_err(|e| row_err(id, e.to_string()))
}

fn render_tuple(entries: &[Expr]) -> String {
    entries.iter().map(canonical_text).collect::<Vec<_>>().join(", ")
}

fn rword_entries(w: &RWord) -> Vec<Expr> {
    let mut out = Vec::new();
    for k in 0..w.a.len() {
        out.push(w.b[k].clone());
        out.push(w.a[k].clone());
    }
    out.push(w.b[w.a.len()].clone());
    out
}

fn lword_entries(w: &LWord) -> Vec<Expr> {
    let mut out = Vec::new();
    for k in 0..w.b.len() {
        out.push(w.a[k].clone());
        out.push(w.b[k].clone());
    }
    out.push(w.a[w.b.len()].clone());
    out
}

/// Computes the row's function and compares canonical forms.
pub fn run_row(row: &FixtureRow) -> Result<RowResult, FixtureError> {
    let id = &row.id;
    let got: String = match row.func.as_str() {
        // right collapses
        "LC" | "RC" | "UC" => {
            let w = to_rword(id, parse_tuple(id, &row.input)?)?;
            let kind = match row.func.as_str() {
                "LC" => CollapseKind::Left,
                "RC" => CollapseKind::Right,
                _ => CollapseKind::Uncollapse,
            };
            let iota = row.iota.clone().unwrap_or_default();
            let out = liberation::right_collapse(kind, &w, &iota).map_err(|e| row_err(id, e.to_string()))?;
            render_tuple(&rword_entries(&out).iter().map(|e| e.normalize()).collect::<Vec<_>>())
        }
        // left collapses
        "LCp" | "RCp" | "UCp" => {
            let w = to_lword(id, parse_tuple(id, &row.input)?)?;
            let kind = match row.func.as_str() {
                "LCp" => CollapseKind::Left,
                "RCp" => CollapseKind::Right,
                _ => CollapseKind::Uncollapse,
            };
            let iota = row.iota.clone().unwrap_or_default();
            let out = liberation::left_collapse(kind, &w, &iota).map_err(|e| row_err(id, e.to_string()))?;
            render_tuple(&lword_entries(&out).iter().map(|e| e.normalize()).collect::<Vec<_>>())
        }
        // right moments
        "LM" | "RM" | "UM" => {
            let w = to_rword(id, parse_tuple(id, &row.input)?)?;
            let kind = match row.func.as_str() {
                "LM" => MomentKind::RightL,
                "RM" => MomentKind::RightR,
                _ => MomentKind::RightU,
            };
            canonical_text(&liberation::right_moment(kind, &w))
        }
        // left moments
        "LMp" | "RMp" | "UMp" => {
            let w = to_lword(id, parse_tuple(id, &row.input)?)?;
            let kind = match row.func.as_str() {
                "LMp" => MomentKind::LeftL,
                "RMp" => MomentKind::LeftR,
                _ => MomentKind::LeftU,
            };
            canonical_text(&liberation::left_moment(kind, &w))
        }
        // strong right moments
        "LMs" | "RMs" | "UMs" => {
            let w = to_rword(id, parse_tuple(id, &row.input)?)?;
            let kind = match row.func.as_str() {
                "LMs" => MomentKind::StrongL,
                "RMs" => MomentKind::StrongR,
                _ => MomentKind::StrongU,
            };
            canonical_text(&liberation::strong_right_moment(kind, &w))
        }
        "Ss" => {
            let tw = parse_timed_input(id, &row.input)?;
            canonical_text(&dilation::ss(&tw))
        }
        "DRM" => {
            let tw = parse_timed_input(id, &row.input)?;
            canonical_text(&dilation::drm(&tw))
        }
        "DUM" => {
            let tw = parse_timed_input(id, &row.input)?;
            canonical_text(&dilation::dum(&tw))
        }
        "DLC" | "DRC" | "DUC" => {
            let tw = parse_timed_input(id, &row.input)?;
            let kind = match row.func.as_str() {
                "DLC" => DiachronicKind::Dlc,
                "DRC" => DiachronicKind::Drc,
                _ => DiachronicKind::Duc,
            };
            let iota = row.iota.clone().unwrap_or_default();
            let out = dilation::diachronic_collapse(kind, &tw, &iota).map_err(|e| row_err(id, e.to_string()))?;
            let ts = out.times.0.iter().map(crate::ir::render_rat).collect::<Vec<_>>().join(",");
            format!("{}; {}", ts, render_tuple(&out.letters))
        }
        other => return Err(row_err(id, format!("unknown fixture fn `{other}`"))),
    };

    // Compare in canonical form: parse the expectation the same way.
    let expect_canonical: String = match row.func.as_str() {
        "LC" | "RC" | "UC" | "LCp" | "RCp" | "UCp" => {
            render_tuple(&parse_tuple(id, &row.expect)?)
        }
        "DLC" | "DRC" | "DUC" => {
            let tw = parse_timed_input(id, &row.expect)?;
            let ts = tw.times.0.iter().map(crate::ir::render_rat).collect::<Vec<_>>().join(",");
            format!("{}; {}", ts, render_tuple(&tw.letters))
        }
        _ => {
            let e = parse(&row.expect).map_err(|e| row_err(id, format!("bad expect: {e}")))?;
            canonical_text(&e)
        }
    };

    Ok(RowResult {
        id: row.id.clone(),
        pass: got == expect_canonical,
        got,
        expect: expect_canonical,
        paper_typo: row.is_paper_typo(),
    })
}

pub fn load_file(path: &std::path::Path) -> Result<Vec<FixtureRow>, FixtureError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Loads a fixture file or every `*.json` in a directory.
pub fn load_path(path: &std::path::Path) -> Result<Vec<FixtureRow>, FixtureError> {
    if path.is_dir() {
        let mut rows = Vec::new();
        let mut files: Vec<_> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
            .collect();
        files.sort();
        for f in files {
            rows.extend(load_file(&f)?);
        }
        Ok(rows)
    } else {
        load_file(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(func: &str, input: &str, iota: Option<Vec<usize>>, expect: &str) -> FixtureRow {
        FixtureRow {
            id: "t".into(),
            func: func.into(),
            input: input.into(),
            iota,
            expect: expect.into(),
            note: None,
            paper: None,
        }
    }

    #[test]
    fn collapse_row_runs() {
        let r = run_row(&row("RC", "b0, a1, b1, a2, b2", Some(vec![1]), "b0, a1, b1 r(a2) b2")).unwrap();
        assert!(r.pass, "got {}", r.got);
    }

    #[test]
    fn moment_row_runs() {
        let r = run_row(&row("LM", "b0, a1, b1", None, "b0 r(a1) b1")).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn ss_row_runs() {
        let r = run_row(&row("Ss", "0,1; a1, a2", None, "a1 p[1](a2)")).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn corrupted_expectation_fails_with_diff() {
        let r = run_row(&row("LM", "b0, a1, b1", None, "b0 r(a1) b0")).unwrap();
        assert!(!r.pass);
        assert_ne!(r.got, r.expect);
    }
}
