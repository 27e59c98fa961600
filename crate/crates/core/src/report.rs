//! Report documents for one support and their JSON, CSV and text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::assoc::{self, MinimalPair};
use crate::error::{Error, Result};
use crate::genericfan::{self, Flags, GenericFan, ORACLE_RANK_CAP};
use crate::linalg;
use crate::polyhedral::FACE_LATTICE_RANK_CAP;
use crate::rootsys::{Family, RootSystem};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// The JSON schema every document validates against.
pub const SCHEMA: &str = include_str!("../report.schema.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Input {
    #[serde(rename = "type")]
    pub type_name: String,
    pub rank: usize,
    pub support: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Normal {
    pub direction: Vec<i64>,
    /// `φ(ω_j)` as `p/q` strings.
    pub phi: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSummary {
    #[serde(rename = "type")]
    pub type_name: String,
    pub support: Vec<usize>,
    pub lattice_relation: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularitySummary {
    pub aut_order: u64,
    pub flag_count: u64,
    pub lattice_regular: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema_version: String,
    pub input: Input,
    pub j_lambda: Vec<usize>,
    pub prim_count: usize,
    pub max_cones: u64,
    pub normal: Option<Normal>,
    pub flags: Flags,
    pub minimal_pair: PairSummary,
    pub regularity: Option<RegularitySummary>,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub oracle: bool,
    pub regularity: bool,
}

fn to_u64(x: u128) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::Invariant(format!("count {x} does not fit in 64 bits")))
}

/// Note when the minimal pair is built on the roots ±ε_i±ε_j although the
/// support is the second node of `B_n` or `C_n`.
fn pair_divergence(gf: &GenericFan, pair: &MinimalPair) -> Option<String> {
    let comps = &gf.root_system().spec().components;
    let [c] = comps.as_slice() else { return None };
    let bc = matches!(c.family, Family::B | Family::C);
    (bc && c.rank >= 3 && gf.support() == [2] && !pair.is_same_pair(gf)).then(|| {
        format!(
            "{c} second node: every facet normal of the cone is a root ±ε_i±ε_j, so the walls span only that D-type subsystem and the minimal pair is ({}, {:?}), \
             not the pair itself",
            pair.roots.type_name(),
            pair.support
        )
    })
}

/// Classify one support and assemble its report.
pub fn analyze(rs: &RootSystem, support: &[usize], opts: Options) -> Result<ReportDocument> {
    let gf = genericfan::build_sigma(rs, support)?;
    gf.check_invariants()?;
    let class = genericfan::classify(&gf, opts.oracle)?;
    let pair = assoc::minimal_pair(&gf)?;
    let mut diagnostics = class.diagnostics;
    if let Some(note) = pair_divergence(&gf, &pair) {
        diagnostics.push(note);
    }
    let regularity = if !opts.regularity {
        None
    } else if gf.rank() > FACE_LATTICE_RANK_CAP {
        diagnostics.push(format!("regularity skipped: rank {} exceeds {FACE_LATTICE_RANK_CAP}", gf.rank()));
        None
    } else {
        let r = assoc::regularity(&gf)?;
        if opts.oracle && gf.rank() <= ORACLE_RANK_CAP {
            let brute = assoc::aut_order_brute_force(&gf)?;
            if brute != r.aut_order {
                return Err(Error::OracleMismatch(format!(
                    "direct automorphism count {brute} differs from {}",
                    r.aut_order
                )));
            }
        }
        Some(RegularitySummary {
            aut_order: to_u64(r.aut_order)?,
            flag_count: to_u64(r.flag_count)?,
            lattice_regular: r.lattice_regular,
        })
    };
    let spec = rs.spec();
    let type_name = match spec.components.as_slice() {
        [c] => c.family.to_string(),
        _ => spec.to_string(),
    };
    Ok(ReportDocument {
        schema_version: SCHEMA_VERSION.into(),
        input: Input { type_name, rank: rs.rank(), support: gf.support().to_vec() },
        j_lambda: gf.j_lambda().to_vec(),
        prim_count: gf.prim().len(),
        max_cones: to_u64(gf.max_cone_count())?,
        normal: class.normal.map(|nd| Normal {
            direction: nd.direction.0,
            phi: nd.phi.iter().map(linalg::rat_string).collect(),
        }),
        flags: class.flags,
        minimal_pair: PairSummary {
            type_name: pair.roots.type_name(),
            support: pair.support.clone(),
            lattice_relation: pair.lattice_relation.to_string(),
        },
        regularity,
        diagnostics,
    })
}

/// Every support meeting each irreducible component, in lexicographic order.
pub fn all_supports(rs: &RootSystem) -> Vec<Vec<usize>> {
    let n = rs.rank();
    let mut out: Vec<Vec<usize>> = (1u64..(1 << n))
        .map(|mask| (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect::<Vec<usize>>())
        .filter(|s| rs.blocks().iter().all(|b| s.iter().any(|l| b.contains(&(l - 1)))))
        .collect();
    out.sort();
    out
}

pub fn set_string(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn to_json(docs: &[ReportDocument], single: bool) -> Result<String> {
    let s = if single && docs.len() == 1 {
        serde_json::to_string_pretty(&docs[0])
    } else {
        serde_json::to_string_pretty(docs)
    };
    s.map(|mut s| {
        s.push('\n');
        s
    })
    .map_err(|e| Error::Invariant(format!("serialization failed: {e}")))
}

const CSV_HEADER: [&str; 19] = [
    "type",
    "rank",
    "support",
    "j_lambda",
    "prim_count",
    "max_cones",
    "normal_direction",
    "phi",
    "q_gorenstein_fano",
    "gorenstein_fano",
    "smooth",
    "fano",
    "pair_type",
    "pair_support",
    "lattice_relation",
    "aut_order",
    "flag_count",
    "lattice_regular",
    "diagnostics",
];

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn to_csv(docs: &[ReportDocument]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::NonNumeric).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Invariant(format!("csv output failed: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for d in docs {
        let (dir, phi) = match &d.normal {
            Some(n) => (join(&n.direction), join(&n.phi)),
            None => (String::new(), String::new()),
        };
        let (aut, flags, reg) = match &d.regularity {
            Some(r) => (r.aut_order.to_string(), r.flag_count.to_string(), r.lattice_regular.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        w.write_record([
            d.input.type_name.clone(),
            d.input.rank.to_string(),
            join(&d.input.support),
            join(&d.j_lambda),
            d.prim_count.to_string(),
            d.max_cones.to_string(),
            dir,
            phi,
            d.flags.q_gorenstein_fano.to_string(),
            d.flags.gorenstein_fano.to_string(),
            d.flags.smooth.to_string(),
            d.flags.fano.to_string(),
            d.minimal_pair.type_name.clone(),
            join(&d.minimal_pair.support),
            d.minimal_pair.lattice_relation.clone(),
            aut,
            flags,
            reg,
            d.diagnostics.join(" | "),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invariant(format!("csv output failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))
}

pub fn to_text(docs: &[ReportDocument]) -> String {
    let mut out = String::new();
    for (k, d) in docs.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let f = &d.flags;
        let _ = writeln!(out, "type        {}{}", d.input.type_name, if d.input.type_name.len() == 1 { d.input.rank.to_string() } else { String::new() });
        let _ = writeln!(out, "support     {}", set_string(&d.input.support));
        let _ = writeln!(out, "J           {}", set_string(&d.j_lambda));
        let _ = writeln!(out, "generators  {} primitive, {} maximal cones", d.prim_count, d.max_cones);
        match &d.normal {
            Some(n) => {
                let _ = writeln!(out, "normal      direction ({}), phi ({})", n.direction.iter().map(ToString::to_string).collect::<Vec<_>>().join(","), n.phi.join(","));
            }
            None => {
                let _ = writeln!(out, "normal      none");
            }
        }
        let _ = writeln!(
            out,
            "flags       Q-Gorenstein-Fano {}, Gorenstein-Fano {}, smooth {}, Fano {}",
            yes_no(f.q_gorenstein_fano),
            yes_no(f.gorenstein_fano),
            yes_no(f.smooth),
            yes_no(f.fano)
        );
        let _ = writeln!(
            out,
            "pair        {} {}, lattice {}",
            d.minimal_pair.type_name,
            set_string(&d.minimal_pair.support),
            d.minimal_pair.lattice_relation
        );
        if let Some(r) = &d.regularity {
            let _ = writeln!(
                out,
                "regularity  aut {}, flags {}, lattice-regular {}",
                r.aut_order,
                r.flag_count,
                yes_no(r.lattice_regular)
            );
        }
        for diag in &d.diagnostics {
            let _ = writeln!(out, "note        {diag}");
        }
    }
    out
}

/// One row of the classification table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub prim_fundamental: String,
    pub geometry: String,
    pub minimal_pair: String,
    pub lattice_regular: String,
}

pub fn geometry_label(f: &Flags) -> &'static str {
    if f.fano {
        "Smooth, Fano"
    } else if f.gorenstein_fano {
        "Gorenstein Fano"
    } else if f.q_gorenstein_fano {
        "Q-Gorenstein Fano"
    } else {
        "not Fano"
    }
}

fn weight_sum(labels: &[usize]) -> String {
    labels.iter().map(|l| format!("-ω{l}")).collect::<Vec<_>>().join("")
}

pub fn table_row(doc: &ReportDocument, same_pair: bool) -> TableRow {
    let name = if doc.input.type_name.len() == 1 {
        format!("{}{}", doc.input.type_name, doc.input.rank)
    } else {
        doc.input.type_name.clone()
    };
    let prim = doc.j_lambda.iter().map(|j| format!("-ω{j}")).collect::<Vec<_>>().join(", ");
    let pair = if same_pair {
        format!("same pair, Λ={}", doc.minimal_pair.lattice_relation)
    } else {
        format!(
            "({}, {}), Λ={}",
            doc.minimal_pair.type_name,
            weight_sum(&doc.minimal_pair.support),
            doc.minimal_pair.lattice_relation
        )
    };
    TableRow {
        label: format!("({name}, {})", weight_sum(&doc.input.support)),
        prim_fundamental: format!("{{{prim}}}"),
        geometry: geometry_label(&doc.flags).into(),
        minimal_pair: pair,
        lattice_regular: match &doc.regularity {
            Some(r) if r.lattice_regular => "yes".into(),
            _ => String::new(),
        },
    }
}

pub const TABLE_HEADER: [&str; 5] = ["(type, λ)", "Prim ∩ {-ω_i}", "Geometry", "minimal pair", "lattice-regular"];

pub fn table_text(rows: &[TableRow]) -> String {
    let cells: Vec<[String; 5]> = std::iter::once(TABLE_HEADER.map(String::from))
        .chain(rows.iter().map(|r| {
            [r.label.clone(), r.prim_fundamental.clone(), r.geometry.clone(), r.minimal_pair.clone(), r.lattice_regular.clone()]
        }))
        .collect();
    let widths: Vec<usize> = (0..5).map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (k, row) in cells.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell}{}", " ".repeat(w - cell.chars().count())))
            .collect();
        let _ = writeln!(out, "{}", line.join(" | ").trim_end());
        if k == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            let _ = writeln!(out, "{}", rule.join("-+-"));
        }
    }
    out
}

pub fn table_csv(rows: &[TableRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::NonNumeric).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Invariant(format!("csv output failed: {e}"));
    w.write_record(TABLE_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([&r.label, &r.prim_fundamental, &r.geometry, &r.minimal_pair, &r.lattice_regular])
            .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invariant(format!("csv output failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))
}
