//! Full line census of a surface: sweep, graph, dossiers, lattice and audits.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, MAX_DEGREE};
use crate::geometry::{
    detect_configurations, enumerate_lines, singular_point_search, ConfigurationCase, IntersectionGraph,
    QuarticSurface, SingularPoint,
};
use crate::io::{FieldFile, LineRecord};
use crate::lattice::{GramLattice, LatticeInvariants};
use crate::segre::{line_dossier, LineDossier};

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    /// line sweep over GF(q^m), m = 1..=ext
    pub ext: u32,
    /// singular point search depth
    pub singular_ext: u32,
    /// fibers searched per line, relative to the census field
    pub fiber_ext: u32,
    pub dossiers: bool,
    pub lattice: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions { ext: 4, singular_ext: 6, fiber_ext: 1, dossiers: true, lattice: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepEntry {
    pub ext: u32,
    pub degree: u32,
    pub lines: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub lines: usize,
    pub edges: usize,
    pub valencies: Vec<usize>,
    pub max_valency: usize,
    pub triangles: usize,
    pub stars: usize,
    pub squares: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DossierRecord {
    #[serde(rename = "line-id")]
    pub line_id: usize,
    #[serde(flatten)]
    pub dossier: LineDossier,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub surface: String,
    pub field: FieldFile,
    pub sweep: Vec<SweepEntry>,
    /// smallest swept extension carrying every line found at the top of the sweep
    pub sufficient_ext: u32,
    pub line_field_degree: u32,
    pub lines: Vec<LineRecord>,
    pub graph: GraphSummary,
    pub dossiers: Vec<DossierRecord>,
    pub case: ConfigurationCase,
    pub certificate_level: u32,
    pub singular_points: Vec<SingularPoint>,
    pub lattice: Option<LatticeInvariants>,
    pub audits: Vec<AuditOutcome>,
}

impl CensusReport {
    pub fn passed(&self) -> bool {
        self.audits.iter().all(|a| a.passed)
    }

    pub fn is_smooth(&self) -> bool {
        self.singular_points.is_empty()
    }
}

fn audit(name: &str, passed: bool, detail: impl Into<String>) -> AuditOutcome {
    AuditOutcome { name: name.into(), passed, detail: detail.into() }
}

/// Lines over every GF(q^m), m <= ext within the field size limit, kept at the
/// smallest level that already carries all lines of the top level.
#[derive(Clone, Debug)]
pub struct LineSweep {
    pub sweep: Vec<SweepEntry>,
    pub sufficient_ext: u32,
    pub field: Field,
    pub graph: IntersectionGraph,
}

pub fn line_sweep(s: &QuarticSurface, ext: u32) -> Result<LineSweep> {
    let k = s.field().degree();
    let top = ext.min(MAX_DEGREE / k);
    if top == 0 {
        return Err(Error::Usage("extension degree must be positive".into()));
    }
    let mut sweep = Vec::new();
    let mut levels = Vec::new();
    for m in 1..=top {
        let (e, lines) = enumerate_lines(s, m)?;
        sweep.push(SweepEntry { ext: m, degree: e.degree(), lines: lines.len() });
        levels.push((e, lines));
    }
    let full = sweep[top as usize - 1].lines;
    let best = (1..=top).find(|&m| top.is_multiple_of(m) && sweep[m as usize - 1].lines == full).unwrap_or(top);
    let (field, lines) = levels.swap_remove(best as usize - 1);
    let graph = IntersectionGraph::new(&field, lines)?;
    Ok(LineSweep { sweep, sufficient_ext: best, field, graph })
}

pub fn census(s: &QuarticSurface, opts: &CensusOptions) -> Result<CensusReport> {
    let LineSweep { sweep, sufficient_ext: best, field: e, graph } = line_sweep(s, opts.ext)?;
    let se = s.base_change(&e)?;
    let sing = singular_point_search(s.field(), s.poly(), opts.singular_ext)?;
    let configs = detect_configurations(&graph);
    let valencies = graph.valencies();
    let n = graph.len();
    let lines: Vec<LineRecord> = graph.lines.iter().enumerate().map(|(i, l)| LineRecord::of(i, l)).collect();
    let summary = GraphSummary {
        lines: n,
        edges: valencies.iter().sum::<usize>() / 2,
        max_valency: valencies.iter().copied().max().unwrap_or(0),
        valencies: valencies.clone(),
        triangles: configs.triangles.len(),
        stars: configs.stars.len(),
        squares: configs.squares.len(),
    };
    let smooth = sing.is_empty();
    let mut audits = Vec::new();

    let mut dossiers = Vec::new();
    if opts.dossiers {
        let results: Vec<Result<LineDossier>> = graph
            .lines
            .par_iter()
            .enumerate()
            .map(|(i, l)| line_dossier(&se, l, Some(valencies[i]), opts.fiber_ext))
            .collect();
        let mut failures = Vec::new();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(d) => dossiers.push(DossierRecord { line_id: i, dossier: d }),
                Err(Error::Audit(m)) => failures.push(format!("line {i}: {m}")),
                Err(err) if !smooth => failures.push(format!("line {i}: {err}")),
                Err(err) => return Err(err),
            }
        }
        if smooth {
            audits.push(audit("divisibility", failures.is_empty(), failures.join("; ")));
            let bad: Vec<usize> =
                dossiers.iter().filter(|d| !d.dossier.valency_within_bounds()).map(|d| d.line_id).collect();
            audits.push(audit("valency-bounds", bad.is_empty(), format!("violations: {bad:?}")));
            let bound_bad: Vec<usize> = dossiers
                .iter()
                .filter(|d| matches!((d.dossier.valency, d.dossier.valency_bound), (Some(v), Some(b)) if v > b))
                .map(|d| d.line_id)
                .collect();
            audits.push(audit("resultant-bound", bound_bad.is_empty(), format!("violations: {bound_bad:?}")));
        } else if !failures.is_empty() {
            audits.push(audit("dossiers-on-singular-surface", true, failures.join("; ")));
        }
    }

    if smooth {
        audits.push(audit("at-most-64", n <= 64, format!("{n} lines")));
        if configs.case == ConfigurationCase::SquarefreeCase {
            let m = summary.max_valency;
            audits.push(audit("squarefree-case-valency", m <= 12, format!("max valency {m}")));
        }
    }

    let lattice = if opts.lattice && n > 0 {
        let inv = GramLattice::from_graph(&graph).invariants()?;
        if smooth {
            use num_traits::Signed;
            let sign_ok = inv.rank < 2 || (inv.discriminant.is_negative() == (inv.rank % 2 == 0));
            audits.push(audit("hyperbolic-sign", sign_ok, format!("rank {} disc {}", inv.rank, inv.discriminant)));
            audits.push(audit("rank-at-most-22", inv.rank <= 22, format!("rank {}", inv.rank)));
        }
        Some(inv)
    } else {
        None
    };

    let consistent = dossiers.iter().all(|d| d.dossier.valency == Some(valencies[d.line_id]))
        && lines.len() == summary.lines;
    audits.push(audit("consistency", consistent, ""));

    Ok(CensusReport {
        surface: s.label().to_string(),
        field: FieldFile::of(s.field()),
        sweep,
        sufficient_ext: best,
        line_field_degree: e.degree(),
        lines,
        graph: summary,
        dossiers,
        case: configs.case,
        certificate_level: sing.certificate_level(),
        singular_points: sing.points,
        lattice,
        audits,
    })
}
