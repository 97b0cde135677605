use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use stratsym::coeffring::{parse_scalar, Point, Poly};
use stratsym::hamflow::{conservation_report, integrate, ConservationReport, HamiltonianSystem};
use stratsym::homology::{
    betti, hard_lefschetz_check, harmonic_classes, hodge_duality_check, BettiTable, DualityVerdict, HardLefschetzVerdict,
    HarmonicClassReport, Operator, Selector,
};
use stratsym::lefschetz::{cavalcanti_check, CavalcantiReport};
use stratsym::models::{catalog, load_builtin, ModelCatalogEntry, ModelError};
use stratsym::stratified::{fiber_constancy_membership, partition_of_unity, BumpSpec, FibrationSpec, StratifiedError};
use stratsym::symplectic::SymplecticModel;

use crate::output::{csv, emit, json, Envelope, SCHEMA_VERSION};
use crate::{Cli, Command, Format};

#[derive(Debug)]
pub enum Failure {
    /// A verdict came out false; the report was still written.
    Verdict,
    /// Bad parameters or an invalid model.
    Invalid(String),
    /// A computation failed after validation.
    Runtime(String),
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let ctx = Context { cli };
    match &cli.command {
        Command::List => ctx.list(),
        Command::Export => ctx.export(),
        Command::Homology { degree, total_degree } => ctx.homology(*degree, *total_degree),
        Command::Lefschetz { k } => ctx.lefschetz(*k),
        Command::Flow { hamiltonian, initial, t_end, dt } => ctx.flow(hamiltonian.as_deref(), initial.as_deref(), *t_end, *dt),
        Command::Pou { epsilon, center, points } => ctx.pou(epsilon, center, *points),
        Command::Membership { poly, dims, degree, samples } => ctx.membership(poly.as_deref(), dims, *degree, *samples),
    }
}

struct Context<'a> {
    cli: &'a Cli,
}

impl Context<'_> {
    fn model(&self) -> Result<ModelCatalogEntry, Failure> {
        let name = self.cli.common.model.as_deref().ok_or_else(|| invalid("--model is required"))?;
        load_model(name).map_err(invalid)
    }

    fn symplectic(&self) -> Result<(ModelCatalogEntry, std::sync::Arc<SymplecticModel>), Failure> {
        let entry = self.model()?;
        let m = entry.symplectic().cloned().ok_or_else(|| invalid(format!("{} has no symplectic chart", entry.name)))?;
        Ok((entry, m))
    }

    fn finish<T: Serialize>(
        &self,
        command: &str,
        pass: bool,
        report: T,
        table: impl FnOnce(&T) -> (Vec<String>, Vec<Vec<String>>),
    ) -> Result<(), Failure> {
        let text = match self.cli.common.format.unwrap_or(Format::Json) {
            Format::Json => json(&Envelope {
                schema_version: SCHEMA_VERSION,
                command,
                model: self.cli.common.model.as_deref(),
                seed: self.cli.common.seed,
                pass,
                report: &report,
            })?,
            Format::Csv => {
                let (header, rows) = table(&report);
                csv(&header, rows)?
            }
        };
        emit(&text, self.cli.common.out.as_deref())?;
        if pass {
            Ok(())
        } else {
            Err(Failure::Verdict)
        }
    }

    fn list(&self) -> Result<(), Failure> {
        let items = catalog();
        self.finish("list", true, items, |items| {
            let rows = items.iter().map(|i| vec![i.name.to_string(), i.description.to_string()]).collect();
            (strings(&["name", "description"]), rows)
        })
    }

    fn export(&self) -> Result<(), Failure> {
        let entry = self.model()?;
        let text = match self.cli.common.format {
            None => entry.to_toml(),
            Some(Format::Json) => json(&entry.to_file())?,
            Some(Format::Csv) => return Err(invalid("export writes TOML or JSON, not CSV")),
        };
        emit(&text, self.cli.common.out.as_deref())
    }

    fn homology(&self, degree: Option<usize>, total_degree: Option<usize>) -> Result<(), Failure> {
        let (_, m) = self.symplectic()?;
        let top = m.dimension();
        let sel = match (m.chart().kind(), total_degree) {
            (stratsym::exterior::ChartKind::ChevalleyEilenberg, None) => Selector::Compact,
            (stratsym::exterior::ChartKind::ChevalleyEilenberg, Some(_)) => {
                return Err(invalid("--total-degree applies to coordinate charts only"))
            }
            (stratsym::exterior::ChartKind::Coordinate, t) => Selector::TotalDegree(t.unwrap_or(top)),
        };
        let degrees = match degree {
            Some(k) if k > top => return Err(invalid(format!("--degree {k} exceeds the dimension {top}"))),
            Some(k) => k..=k,
            None => 0..=top,
        };
        let d = betti(&m, Operator::D, sel).map_err(invalid)?;
        let delta = betti(&m, Operator::Delta, sel).map_err(invalid)?;
        let duality = hodge_duality_check(&m, sel, degrees).map_err(invalid)?;
        let report = HomologyReport { d, delta, duality };
        self.finish("homology", report.duality.pass, report, |r| {
            let mut rows = Vec::new();
            for (name, t) in [("d", &r.d), ("delta", &r.delta)] {
                for k in 0..t.ranks.len() {
                    rows.push(vec![name.to_string(), k.to_string(), t.dims[k].to_string(), t.ranks[k].to_string()]);
                }
            }
            (strings(&["operator", "degree", "chain_dim", "rank"]), rows)
        })
    }

    fn lefschetz(&self, k: Option<usize>) -> Result<(), Failure> {
        let (_, m) = self.symplectic()?;
        if let Some(k) = k {
            if k > m.n() {
                return Err(invalid(format!("--k {k} exceeds n = {}", m.n())));
            }
        }
        let mut hard = hard_lefschetz_check(&m).map_err(invalid)?;
        if let Some(k) = k {
            hard.retain(|v| v.k == k);
        }
        let harmonic = harmonic_classes(&m).map_err(invalid)?;
        let cavalcanti = cavalcanti_check(&m, Selector::Compact).map_err(invalid)?;
        let hard_lefschetz = hard.iter().all(|v| v.pass);
        let all_harmonic = harmonic.iter().all(|r| r.found == r.classes);
        let full_hard = match k {
            None => hard_lefschetz,
            Some(_) => hard_lefschetz_check(&m).map_err(invalid)?.iter().all(|v| v.pass),
        };
        let report = LefschetzReport {
            hard,
            harmonic,
            hard_lefschetz,
            all_classes_harmonic: all_harmonic,
            equivalence_holds: full_hard == all_harmonic,
            cavalcanti,
        };
        self.finish("lefschetz", report.equivalence_holds, report, |r| {
            let mut rows: Vec<Vec<String>> =
                r.hard.iter().map(|v| vec!["hard_lefschetz".into(), v.k.to_string(), v.pass.to_string()]).collect();
            rows.extend(
                r.harmonic.iter().map(|h| vec!["harmonic".into(), h.degree.to_string(), (h.found == h.classes).to_string()]),
            );
            rows.extend(
                r.cavalcanti.degrees.iter().map(|c| vec!["cavalcanti".into(), c.degree.to_string(), c.holds.to_string()]),
            );
            rows.push(vec!["equivalence".into(), String::new(), r.equivalence_holds.to_string()]);
            (strings(&["check", "index", "pass"]), rows)
        })
    }

    fn flow(&self, h: Option<&str>, initial: Option<&[f64]>, t_end: f64, dt: f64) -> Result<(), Failure> {
        let entry = self.model()?;
        let sys = match h {
            Some(src) => {
                let poisson = entry.poisson().ok_or_else(|| invalid(format!("{} has no Poisson presentation", entry.name)))?;
                let p = Poly::parse(src, poisson.vars()).map_err(invalid)?;
                let strata = match &entry.data {
                    stratsym::models::ModelData::Poisson { strata, .. } => strata.clone(),
                    stratsym::models::ModelData::Symplectic(_) => Vec::new(),
                };
                HamiltonianSystem::new(poisson.clone(), p, strata).map_err(invalid)?
            }
            None => entry
                .hamiltonian_system(0)
                .map_err(invalid)?
                .ok_or_else(|| invalid(format!("{} ships no Hamiltonian", entry.name)))?,
        };
        let n = sys.vars().len();
        let x0 = match initial {
            Some(x) => x.to_vec(),
            None => (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
        };
        let traj = integrate(&sys, &x0, t_end, dt).map_err(|e| match e {
            stratsym::hamflow::HamflowError::NonFiniteState { .. } => Failure::Runtime(e.to_string()),
            other => invalid(other),
        })?;
        let conservation = conservation_report(&traj, &sys);
        let pass = conservation.passes(DRIFT_TOLERANCE);
        match self.cli.common.format.unwrap_or(Format::Json) {
            Format::Csv => {
                emit(&csv(&traj.csv_header(), traj.csv_rows())?, self.cli.common.out.as_deref())?;
                if pass {
                    Ok(())
                } else {
                    Err(Failure::Verdict)
                }
            }
            Format::Json => {
                let report = FlowReport {
                    hamiltonian: sys.hamiltonian().to_string(),
                    vector_field: stratsym::hamflow::ham_vector_field(&sys).iter().map(|p| p.to_string()).collect(),
                    initial: x0,
                    t_end,
                    dt,
                    steps: traj.len().saturating_sub(1),
                    final_state: traj.states.last().cloned().unwrap_or_default(),
                    final_stratum: traj.stratum_ids.last().cloned().unwrap_or_default(),
                    drift_tolerance: DRIFT_TOLERANCE,
                    conservation,
                };
                self.finish("flow", pass, report, |_| unreachable!())
            }
        }
    }

    fn pou(&self, epsilon: &str, center: &str, points: usize) -> Result<(), Failure> {
        let eps = parse_scalar(epsilon).map_err(invalid)?;
        let c = parse_scalar(center).map_err(invalid)?;
        if points < 2 {
            return Err(invalid("--points must be at least 2"));
        }
        let cover = vec![
            BumpSpec::apex(eps.clone(), "t").map_err(invalid)?,
            BumpSpec::regular_point(eps, &[("t".to_string(), c)]).map_err(invalid)?,
        ];
        let grid: Vec<f64> = (0..points).map(|i| 1.5 * i as f64 / (points - 1) as f64).collect();
        let samples: Vec<Point> = grid.iter().map(|&t| [("t".to_string(), t)].into_iter().collect()).collect();
        let (report, pass) = match partition_of_unity(&cover, &samples) {
            Ok(pou) => {
                let values: Vec<[f64; 2]> = samples
                    .iter()
                    .map(|p| {
                        let f = |i: usize| pou.functions[i].eval(p).map_err(|e| Failure::Runtime(e.to_string()));
                        Ok([f(0)?, f(1)?])
                    })
                    .collect::<Result<_, Failure>>()?;
                let pass = pou.max_sum_error <= 1e-12 && pou.min_value >= 0.0 && pou.supports_ok;
                let report = PouReport {
                    epsilon: epsilon.to_string(),
                    center: center.to_string(),
                    points,
                    gap: None,
                    max_sum_error: Some(pou.max_sum_error),
                    min_value: Some(pou.min_value),
                    supports_ok: Some(pou.supports_ok),
                    grid,
                    values,
                };
                (report, pass)
            }
            Err(StratifiedError::CoverGap(at)) => {
                let report = PouReport {
                    epsilon: epsilon.to_string(),
                    center: center.to_string(),
                    points,
                    gap: Some(at),
                    max_sum_error: None,
                    min_value: None,
                    supports_ok: None,
                    grid: Vec::new(),
                    values: Vec::new(),
                };
                (report, false)
            }
            Err(e) => return Err(Failure::Runtime(e.to_string())),
        };
        self.finish("pou", pass, report, |r| {
            let rows = r
                .grid
                .iter()
                .zip(&r.values)
                .map(|(t, v)| vec![t.to_string(), v[0].to_string(), v[1].to_string(), (v[0] + v[1]).to_string()])
                .collect();
            (strings(&["t", "f_apex", "f_regular", "sum"]), rows)
        })
    }

    fn membership(&self, poly: Option<&str>, dims: &[usize], degree: u32, samples: usize) -> Result<(), Failure> {
        let [n, k, l] = dims else {
            return Err(invalid("--dims takes three values n,k,l"));
        };
        let spec = FibrationSpec::from_dims(*n, *k, *l).map_err(invalid)?;
        let vars = spec.vars();
        let polys: Vec<Poly> = match poly {
            Some(src) => vec![Poly::parse(src, &vars).map_err(invalid)?],
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cli.common.seed);
                (0..samples).map(|_| stratsym::sample::random_poly(&mut rng, &vars, degree, 4)).collect()
            }
        };
        let mut entries = Vec::new();
        for g in &polys {
            let m = fiber_constancy_membership(g, &spec).map_err(invalid)?;
            let certificate = m.certificate.as_ref().map(|c| Certificate {
                normal_parts: c.normal_parts.iter().map(|p| p.to_string()).collect(),
                base_part: c.base_part.to_string(),
                reassembles: c.reassemble(&spec) == *g,
            });
            entries.push(MembershipEntry {
                poly: g.to_string(),
                member: m.member,
                verdict: if m.member { "member" } else { "not a member" },
                restriction: m.restriction.to_string(),
                certificate,
            });
        }
        let pass = entries.iter().all(|e| e.certificate.as_ref().is_none_or(|c| c.reassembles));
        let report = MembershipReport { fibration: spec, entries };
        self.finish("membership", pass, report, |r| {
            let rows = r
                .entries
                .iter()
                .map(|e| vec![e.poly.clone(), e.member.to_string(), e.restriction.clone()])
                .collect();
            (strings(&["poly", "member", "restriction"]), rows)
        })
    }
}

const DRIFT_TOLERANCE: f64 = 1e-9;

pub fn load_model(source: &str) -> Result<ModelCatalogEntry, ModelError> {
    let path = Path::new(source);
    if path.exists() || source.ends_with(".toml") {
        let text = std::fs::read_to_string(path).map_err(|e| ModelError::File(format!("{source}: {e}")))?;
        return ModelCatalogEntry::from_toml(&text);
    }
    load_builtin(source)
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Serialize)]
struct HomologyReport {
    d: BettiTable,
    delta: BettiTable,
    duality: DualityVerdict,
}

#[derive(Debug, Serialize)]
struct LefschetzReport {
    hard: Vec<HardLefschetzVerdict>,
    harmonic: Vec<HarmonicClassReport>,
    hard_lefschetz: bool,
    all_classes_harmonic: bool,
    equivalence_holds: bool,
    cavalcanti: CavalcantiReport,
}

#[derive(Debug, Serialize)]
struct FlowReport {
    hamiltonian: String,
    vector_field: Vec<String>,
    initial: Vec<f64>,
    t_end: f64,
    dt: f64,
    steps: usize,
    final_state: Vec<f64>,
    final_stratum: String,
    drift_tolerance: f64,
    conservation: ConservationReport,
}

#[derive(Debug, Serialize)]
struct PouReport {
    epsilon: String,
    center: String,
    points: usize,
    gap: Option<String>,
    max_sum_error: Option<f64>,
    min_value: Option<f64>,
    supports_ok: Option<bool>,
    grid: Vec<f64>,
    values: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
struct Certificate {
    normal_parts: Vec<String>,
    base_part: String,
    reassembles: bool,
}

#[derive(Debug, Serialize)]
struct MembershipEntry {
    poly: String,
    member: bool,
    verdict: &'static str,
    restriction: String,
    certificate: Option<Certificate>,
}

#[derive(Debug, Serialize)]
struct MembershipReport {
    fibration: FibrationSpec,
    entries: Vec<MembershipEntry>,
}
