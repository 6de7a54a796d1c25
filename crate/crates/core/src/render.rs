//! Text, JSON and CSV output.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::families::FamilyReport;
use crate::picard::format_tuple;
use crate::search::Candidate;
use crate::tower::TowerSummary;
use crate::verify::VerifySummary;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Serialize)]
struct CsvRow {
    family: u32,
    #[serde(rename = "K2")]
    k2: i64,
    pg: i64,
    q: i64,
    bpf: &'static str,
    image_degree: i64,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn csv_string<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv output is utf-8")
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes")
}

pub fn table_csv(reports: &[FamilyReport]) -> String {
    csv_string(reports.iter().map(|r| CsvRow {
        family: r.id.get(),
        k2: r.invariants.k2,
        pg: r.invariants.pg,
        q: r.invariants.q,
        bpf: yes_no(r.bpf),
        image_degree: r.image_degree,
    }))
}

pub fn table_json(reports: &[FamilyReport]) -> String {
    pretty(&reports.iter().map(FamilyReport::record).collect::<Vec<_>>())
}

pub fn table_text(reports: &[FamilyReport]) -> String {
    let mut out = String::new();
    if let Some(r) = reports.first() {
        let _ = writeln!(out, "n = {}", r.n);
    }
    let _ = writeln!(
        out,
        "{:>6} {:>8} {:>8} {:>3} {:>4} {:>6}  fixed part",
        "family", "K2", "pg", "q", "bpf", "image"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:>6} {:>8} {:>8} {:>3} {:>4} {:>6}  {}{}",
            r.id.get(),
            r.invariants.k2,
            r.invariants.pg,
            r.invariants.q,
            yes_no(r.bpf),
            r.image_degree,
            r.fixed_part_label(),
            if r.consistent() {
                ""
            } else {
                "  [inconsistent]"
            }
        );
    }
    out
}

pub fn table(reports: &[FamilyReport], format: Format) -> String {
    match format {
        Format::Text => table_text(reports),
        Format::Json => table_json(reports),
        Format::Csv => table_csv(reports),
    }
}

pub fn family_json(r: &FamilyReport) -> Value {
    let mut v = serde_json::to_value(r.record()).expect("plain data serializes");
    let building: Vec<Value> = r
        .building_data()
        .into_iter()
        .map(|(chi, l)| json!({ "character": chi, "L": l }))
        .collect();
    let obj = v.as_object_mut().expect("record is an object");
    obj.insert("building_data".into(), Value::Array(building));
    obj.insert(
        "tower".into(),
        serde_json::to_value(r.tower_summary()).expect("plain data serializes"),
    );
    obj.insert(
        "checks".into(),
        serde_json::to_value(&r.checks).expect("plain data serializes"),
    );
    v
}

fn tower_lines(out: &mut String, t: &TowerSummary) {
    for s in &t.steps {
        let _ = write!(
            out,
            "  step {}: 2L{} = 2({})",
            s.step, s.character, s.l_class
        );
        if !s.curve_branch.is_empty() {
            let _ = write!(out, ", curves {}", s.curve_branch.join(", "));
        }
        let _ = write!(out, ", {} isolated branch points", s.nodes);
        match &s.canonical {
            Some(k) => {
                let _ = writeln!(out, ", K = f*({k})");
            }
            None => {
                let _ = writeln!(out);
            }
        }
    }
}

pub fn family_text(r: &FamilyReport) -> String {
    let mut out = String::new();
    let inv = &r.invariants;
    let _ = writeln!(out, "family {} (n = {}, {})", r.id, r.n, r.construction);
    if r.internal_n != r.n {
        let _ = writeln!(out, "construction parameter: {}", r.internal_n);
    }
    if let Some(p) = &r.point {
        let _ = writeln!(out, "imposed point: {p}");
    }
    let _ = writeln!(out, "K2: {}", inv.k2);
    let _ = writeln!(out, "pg: {}", inv.pg);
    let _ = writeln!(out, "chi: {}", inv.chi);
    let _ = writeln!(out, "q: {}", inv.q);
    let _ = writeln!(out, "2K_X = f*({})", r.two_k_class);
    let _ = writeln!(out, "map degree: {}", r.map_degree);
    let _ = writeln!(out, "image degree: {}", r.image_degree);
    let _ = writeln!(out, "moving part: f*({})", r.moving_class);
    let _ = writeln!(out, "fixed part: {}", r.fixed_part_label());
    if let Some(nodes) = r.nodes {
        let _ = writeln!(out, "nodes: {nodes}");
    }
    let _ = writeln!(out, "base point free: {}", yes_no(r.bpf));
    let _ = writeln!(out, "building data:");
    for (chi, l) in r.building_data() {
        let _ = writeln!(out, "  L{chi} = {l}");
    }
    let _ = writeln!(out, "tower:");
    tower_lines(&mut out, &r.tower_summary());
    let names: Vec<String> = r.assumptions.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "assumptions: {}", names.join(", "));
    for c in r.failed_checks() {
        let _ = writeln!(out, "FAILED {}: {}", c.name, c.detail);
    }
    out
}

pub fn family(r: &FamilyReport, format: Format) -> String {
    match format {
        Format::Text => family_text(r),
        Format::Json => pretty(&family_json(r)),
        Format::Csv => table_csv(std::slice::from_ref(r)),
    }
}

/// Tower and fixed-part detail for one family.
pub fn tower(r: &FamilyReport, format: Format) -> String {
    let f = &r.fixed;
    match format {
        Format::Json | Format::Csv => pretty(&json!({
            "family": r.id.get(),
            "n": r.n,
            "tower": r.tower_summary(),
            "moving_class": r.moving_class,
            "fixed_part": f,
        })),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "family {} (n = {})", r.id, r.n);
            tower_lines(&mut out, &r.tower_summary());
            match r.tower.h0_pullback(&r.moving_class, r.tower.len()) {
                Ok(h) => {
                    let _ = writeln!(out, "moving part: f*({}), h0 = {h}", r.moving_class);
                }
                Err(e) => {
                    let _ = writeln!(
                        out,
                        "moving part: f*({}), h0 unavailable: {e}",
                        r.moving_class
                    );
                }
            }
            let _ = writeln!(out, "h0(K) = {}", f.h0_k);
            let _ = writeln!(out, "fixed part: {}", r.fixed_part_label());
            for c in &f.fixed_curves {
                let _ = writeln!(
                    out,
                    "  over {}: self-intersection {}, genus {}",
                    c.base_class, c.self_int, c.genus
                );
            }
            out
        }
    }
}

pub fn verify(s: &VerifySummary, format: Format) -> String {
    match format {
        Format::Json => pretty(s),
        Format::Csv => csv_string(s.checks.iter().map(|c| (c.name, c.passed, c.failed))),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "n = {}..{}", s.n_lo, s.n_hi);
            for c in &s.checks {
                let status = if c.failed == 0 && c.passed > 0 {
                    "ok"
                } else {
                    "FAIL"
                };
                let _ = write!(
                    out,
                    "{status:>4} {:<18} {} passed, {} failed",
                    c.name, c.passed, c.failed
                );
                if let Some(f) = &c.first_failure {
                    let _ = write!(out, "  ({f})");
                }
                let _ = writeln!(out);
            }
            let _ = writeln!(
                out,
                "{}",
                if s.all_passed() {
                    "all checks passed"
                } else {
                    "verification failed"
                }
            );
            out
        }
    }
}

#[derive(Serialize)]
struct CandidateRow {
    point: String,
    family: Option<u32>,
    #[serde(rename = "K2")]
    k2: Option<i64>,
    pg: Option<i64>,
    q: Option<i64>,
    minimal: Option<bool>,
    failure: Option<String>,
}

fn candidate_row(c: &Candidate) -> CandidateRow {
    let point = c.point.clone().unwrap_or_else(|| "base".into());
    match &c.outcome {
        Ok(i) => CandidateRow {
            point,
            family: c.family,
            k2: Some(i.k2),
            pg: Some(i.pg),
            q: Some(i.q),
            minimal: Some(i.minimal),
            failure: None,
        },
        Err(f) => CandidateRow {
            point,
            family: c.family,
            k2: None,
            pg: None,
            q: None,
            minimal: None,
            failure: Some(format!("{}: {}", f.check, f.message)),
        },
    }
}

pub fn search(cands: &[Candidate], format: Format) -> String {
    match format {
        Format::Json => pretty(&cands),
        Format::Csv => csv_string(cands.iter().map(candidate_row)),
        Format::Text => {
            let mut out = String::new();
            for c in cands {
                let row = candidate_row(c);
                let label = row
                    .family
                    .map(|f| format!("  family {f}"))
                    .unwrap_or_default();
                match (&c.outcome, row.failure) {
                    (Ok(i), _) => {
                        let _ = write!(
                            out,
                            "{:<20} K2 {:>6} pg {:>5} q {:>2}",
                            row.point, i.k2, i.pg, i.q
                        );
                        if let Some(w) = &i.witness {
                            let _ = write!(out, "  not minimal ({w})");
                        }
                        let _ = writeln!(out, "{label}");
                    }
                    (Err(_), failure) => {
                        let _ = writeln!(
                            out,
                            "{:<20} failed {}{label}",
                            row.point,
                            failure.unwrap_or_default()
                        );
                    }
                }
            }
            out
        }
    }
}

pub fn points(points: &[Vec<i64>], format: Format) -> String {
    match format {
        Format::Json => pretty(&points),
        Format::Text | Format::Csv => {
            let mut out = String::new();
            for p in points {
                let _ = writeln!(out, "{}", format_tuple(p));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, theorem_table, FamilyRecord};

    #[test]
    fn csv_table() {
        let csv = table_csv(&theorem_table(2).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "family,K2,pg,q,bpf,image_degree");
        assert_eq!(lines[1], "1,24,5,0,yes,3");
        assert_eq!(lines.len(), 10);
    }

    #[test]
    fn family_outputs() {
        let r = build_family(4, 3).unwrap();
        assert!(family_text(&r).contains("nodes: 30"));
        let v = family_json(&r);
        assert_eq!(v["K2"], 38);
        assert_eq!(v["building_data"].as_array().unwrap().len(), 7);
        assert_eq!(v["tower"]["steps"].as_array().unwrap().len(), 3);
        let back: FamilyRecord = serde_json::from_value(v).unwrap();
        assert_eq!(back, r.record());
    }

    #[test]
    fn json_table_round_trip() {
        let reports = theorem_table(4).unwrap();
        let back: Vec<FamilyRecord> = serde_json::from_str(&table_json(&reports)).unwrap();
        let direct: Vec<FamilyRecord> = reports.iter().map(FamilyReport::record).collect();
        assert_eq!(back, direct);
    }
}
