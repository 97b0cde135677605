//! Shipped instances and the TOML model-file format.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffring::{int, CoeffError, Poly};
use crate::exterior::{ExteriorError, ModelChart};
use crate::hamflow::{HamflowError, HamiltonianSystem, PredicateSpec, StratumPredicate};
use crate::stratified::{OrderPair, Presentation, StratifiedError, StratifiedModel, StratumRecord};
use crate::symplectic::{PoissonPresentation, PoissonSpec, SymplecticError, SymplecticModel, SymplecticSpec};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Stratified(#[from] StratifiedError),
    #[error(transparent)]
    Hamflow(#[from] HamflowError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("model file: {0}")]
    File(String),
}

/// The algebraic data of a model: a constant symplectic structure on a chart,
/// or a Poisson presentation with stratum predicates and Hamiltonians.
#[derive(Debug, Clone)]
pub enum ModelData {
    Symplectic(Arc<SymplecticModel>),
    Poisson {
        poisson: Arc<PoissonPresentation>,
        strata: Vec<StratumPredicate>,
        hamiltonians: Vec<Poly>,
    },
}

#[derive(Debug, Clone)]
pub struct ModelCatalogEntry {
    pub name: String,
    pub description: String,
    pub data: ModelData,
    pub stratification: StratifiedModel,
}

impl ModelCatalogEntry {
    pub fn symplectic(&self) -> Option<&Arc<SymplecticModel>> {
        match &self.data {
            ModelData::Symplectic(m) => Some(m),
            ModelData::Poisson { .. } => None,
        }
    }

    pub fn poisson(&self) -> Option<&Arc<PoissonPresentation>> {
        match &self.data {
            ModelData::Poisson { poisson, .. } => Some(poisson),
            ModelData::Symplectic(_) => None,
        }
    }

    /// The Hamiltonian system for the `index`-th shipped Hamiltonian.
    pub fn hamiltonian_system(&self, index: usize) -> Result<Option<HamiltonianSystem>, ModelError> {
        match &self.data {
            ModelData::Poisson { poisson, strata, hamiltonians } => match hamiltonians.get(index) {
                Some(h) => Ok(Some(HamiltonianSystem::new(poisson.clone(), h.clone(), strata.clone())?)),
                None => Ok(None),
            },
            ModelData::Symplectic(_) => Ok(None),
        }
    }

    pub fn hamiltonians(&self) -> &[Poly] {
        match &self.data {
            ModelData::Poisson { hamiltonians, .. } => hamiltonians,
            ModelData::Symplectic(_) => &[],
        }
    }

    pub fn to_file(&self) -> ModelFile {
        let (symplectic, poisson, strata, hamiltonians) = match &self.data {
            ModelData::Symplectic(m) => (Some(m.to_spec()), None, Vec::new(), Vec::new()),
            ModelData::Poisson { poisson, strata, hamiltonians } => (
                None,
                Some(poisson.to_spec()),
                strata.iter().map(|s| s.to_spec()).collect(),
                hamiltonians.iter().map(|h| h.to_string()).collect(),
            ),
        };
        let s = &self.stratification;
        ModelFile {
            schema_version: 1,
            name: self.name.clone(),
            description: self.description.clone(),
            symplectic,
            poisson,
            strata,
            hamiltonians,
            stratification: StratificationSpec {
                strata: s.strata().to_vec(),
                order: s.order_pairs(),
                compact: s.is_compact(),
                presentation: s.presentation().cloned(),
            },
        }
    }

    /// Validates every component of the file.
    pub fn from_file(file: &ModelFile) -> Result<Self, ModelError> {
        if file.schema_version != 1 {
            return Err(ModelError::File(format!("unsupported schema_version {}", file.schema_version)));
        }
        let data = match (&file.symplectic, &file.poisson) {
            (Some(s), None) => ModelData::Symplectic(Arc::new(SymplecticModel::from_spec(s)?)),
            (None, Some(p)) => {
                let poisson = Arc::new(PoissonPresentation::from_spec(p)?);
                let vars = poisson.vars().clone();
                let strata = file
                    .strata
                    .iter()
                    .map(|s| StratumPredicate::from_spec(s, &vars))
                    .collect::<Result<Vec<_>, _>>()?;
                let hamiltonians =
                    file.hamiltonians.iter().map(|h| Poly::parse(h, &vars)).collect::<Result<Vec<_>, _>>()?;
                for h in &hamiltonians {
                    HamiltonianSystem::new(poisson.clone(), h.clone(), strata.clone())?;
                }
                ModelData::Poisson { poisson, strata, hamiltonians }
            }
            _ => return Err(ModelError::File("exactly one of `symplectic` and `poisson` is required".into())),
        };
        let st = &file.stratification;
        let mut stratification = StratifiedModel::new(st.strata.clone(), st.order.clone(), st.compact)?;
        if let Some(p) = &st.presentation {
            stratification = stratification.with_presentation(p.clone());
        }
        if let ModelData::Symplectic(m) = &data {
            let top = (0..st.strata.len()).find(|&i| st.strata[i].is_regular && st.strata[i].dimension == m.dimension());
            let top = top.ok_or_else(|| ModelError::File("no regular stratum matches the chart dimension".into()))?;
            stratification = stratification.with_chart(top, m.chart().clone())?;
        }
        Ok(ModelCatalogEntry { name: file.name.clone(), description: file.description.clone(), data, stratification })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("model files serialize")
    }

    pub fn from_toml(src: &str) -> Result<Self, ModelError> {
        let file: ModelFile = toml::from_str(src).map_err(|e| ModelError::File(e.to_string()))?;
        Self::from_file(&file)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratificationSpec {
    pub strata: Vec<StratumRecord>,
    #[serde(default)]
    pub order: Vec<OrderPair>,
    pub compact: bool,
    #[serde(default)]
    pub presentation: Option<Presentation>,
}

/// On-disk model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub symplectic: Option<SymplecticSpec>,
    #[serde(default)]
    pub poisson: Option<PoissonSpec>,
    #[serde(default)]
    pub strata: Vec<PredicateSpec>,
    #[serde(default)]
    pub hamiltonians: Vec<String>,
    pub stratification: StratificationSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogItem {
    pub name: &'static str,
    pub description: &'static str,
}

pub fn catalog() -> Vec<CatalogItem> {
    vec![
        CatalogItem { name: "r2n(n)", description: "coordinate R^{2n} with the standard symplectic form" },
        CatalogItem { name: "torus4", description: "flat 4-torus as an abelian Chevalley-Eilenberg complex" },
        CatalogItem { name: "kodaira_thurston", description: "Kodaira-Thurston nilmanifold, de^4 = e^1 e^2" },
        CatalogItem { name: "cz2_cone", description: "C/Z2 as the cone w^2 = uv of quadratic invariants" },
        CatalogItem { name: "sl2_cone", description: "nilpotent cone h^2 + 4ef = 0 in sl2*" },
    ]
}

pub fn load_builtin(name: &str) -> Result<ModelCatalogEntry, ModelError> {
    let unknown = || ModelError::UnknownModel(name.to_string());
    if let Some(rest) = name.strip_prefix("r2n") {
        let n: usize = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(rest)
            .parse()
            .map_err(|_| unknown())?;
        if n == 0 {
            return Err(unknown());
        }
        return r2n(n);
    }
    match name {
        "torus4" => ce_model(
            "torus4",
            "flat 4-torus; left-invariant forms on R^4/Z^4",
            &[],
        ),
        "kodaira_thurston" => ce_model(
            "kodaira_thurston",
            "Kodaira-Thurston nilmanifold; de4 = e1 e2, omega = e1 e3 + e2 e4",
            &[(3, 0, 1)],
        ),
        "cz2_cone" => cz2_cone(),
        "sl2_cone" => sl2_cone(),
        _ => Err(unknown()),
    }
}

fn r2n(n: usize) -> Result<ModelCatalogEntry, ModelError> {
    let m = Arc::new(SymplecticModel::standard(n)?);
    let strat = StratifiedModel::new(
        vec![StratumRecord { id: format!("R{}", 2 * n), dimension: 2 * n, is_regular: true }],
        vec![],
        false,
    )?
    .with_presentation(Presentation::Embedded { ambient_dimension: 2 * n, defining: vec![] })
    .with_chart(0, m.chart().clone())?;
    Ok(ModelCatalogEntry {
        name: format!("r2n({n})"),
        description: format!("coordinate R^{} with omega = sum dx_i dy_i", 2 * n),
        data: ModelData::Symplectic(m),
        stratification: strat,
    })
}

fn ce_model(name: &str, description: &str, structure: &[(usize, usize, usize)]) -> Result<ModelCatalogEntry, ModelError> {
    let consts: Vec<_> = structure.iter().map(|&(k, i, j)| (k, i, j, int(1))).collect();
    let chart = Arc::new(ModelChart::chevalley_eilenberg(&["e1", "e2", "e3", "e4"], &consts)?);
    let m = Arc::new(SymplecticModel::from_entries(chart.clone(), &[(0, 2, int(1)), (1, 3, int(1))])?);
    let strat = StratifiedModel::manifold(name, 4).with_chart(0, chart)?;
    Ok(ModelCatalogEntry {
        name: name.into(),
        description: description.into(),
        data: ModelData::Symplectic(m),
        stratification: strat,
    })
}

fn singular_cone(apex: &str, regular: &str) -> Result<StratifiedModel, ModelError> {
    Ok(StratifiedModel::new(
        vec![
            StratumRecord { id: apex.into(), dimension: 0, is_regular: false },
            StratumRecord { id: regular.into(), dimension: 2, is_regular: true },
        ],
        vec![OrderPair { lower: 0, upper: 1, witness: "the origin is a limit of scaled regular points".into() }],
        false,
    )?)
}

fn poisson_model(
    name: &str,
    description: &str,
    spec: PoissonSpec,
    strata: Vec<PredicateSpec>,
    hamiltonians: &[&str],
    stratification: StratifiedModel,
) -> Result<ModelCatalogEntry, ModelError> {
    let poisson = Arc::new(PoissonPresentation::from_spec(&spec)?);
    let vars = poisson.vars().clone();
    let strata = strata.iter().map(|s| StratumPredicate::from_spec(s, &vars)).collect::<Result<Vec<_>, _>>()?;
    let hamiltonians = hamiltonians.iter().map(|h| Poly::parse(h, &vars)).collect::<Result<Vec<_>, _>>()?;
    for h in &hamiltonians {
        HamiltonianSystem::new(poisson.clone(), h.clone(), strata.clone())?;
    }
    Ok(ModelCatalogEntry {
        name: name.into(),
        description: description.into(),
        data: ModelData::Poisson { poisson, strata, hamiltonians },
        stratification,
    })
}

fn origin_and_rest(origin: &str, rest: &str, gens: &[&str]) -> Vec<PredicateSpec> {
    let g: Vec<String> = gens.iter().map(|s| s.to_string()).collect();
    vec![
        PredicateSpec { id: origin.into(), zero: g.clone(), nonzero: vec![] },
        PredicateSpec { id: rest.into(), zero: vec![], nonzero: g },
    ]
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn cz2_cone() -> Result<ModelCatalogEntry, ModelError> {
    let spec = PoissonSpec {
        generators: strings(&["u", "v", "w"]),
        weights: vec![2, 2, 2],
        order: strings(&["w", "u", "v"]),
        relations: strings(&["w^2 - u*v"]),
        brackets: vec![
            ("u".into(), "v".into(), "4*w".into()),
            ("u".into(), "w".into(), "2*u".into()),
            ("v".into(), "w".into(), "-2*v".into()),
        ],
    };
    let strat = singular_cone("apex", "regular")?.with_presentation(Presentation::Quotient {
        action: "Z2 acting on R^2 by (x, y) -> (-x, -y)".into(),
        invariant_generators: strings(&["x^2", "y^2", "x*y"]),
    });
    poisson_model(
        "cz2_cone",
        "C/Z2 with u = x^2, v = y^2, w = xy and the bracket induced from {x, y} = 1",
        spec,
        origin_and_rest("apex", "regular", &["u", "v", "w"]),
        &["u + v", "w", "u - v", "u*v"],
        strat,
    )
}

fn sl2_cone() -> Result<ModelCatalogEntry, ModelError> {
    let spec = PoissonSpec {
        generators: strings(&["e", "f", "h"]),
        weights: vec![1, 1, 1],
        order: strings(&["h", "e", "f"]),
        relations: strings(&["h^2 + 4*e*f"]),
        brackets: vec![
            ("h".into(), "e".into(), "2*e".into()),
            ("h".into(), "f".into(), "-2*f".into()),
            ("e".into(), "f".into(), "h".into()),
        ],
    };
    let strat = singular_cone("origin", "punctured_cone")?.with_presentation(Presentation::Embedded {
        ambient_dimension: 3,
        defining: strings(&["h^2 + 4*e*f"]),
    });
    poisson_model(
        "sl2_cone",
        "nilpotent cone of sl2 with the Lie-Poisson bracket, Casimir level 0",
        spec,
        origin_and_rest("origin", "punctured_cone", &["e", "f", "h"]),
        &["h", "e + f", "e*f"],
        strat,
    )
}
