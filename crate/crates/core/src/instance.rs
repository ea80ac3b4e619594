//! JSON instance files.
//!
//! ```json
//! {
//!   "vertices": ["a", "b"],
//!   "edges": [{"ends": ["a", "b"], "length": 3}],
//!   "scattering": {
//!     "a": {"type": "constant_involution", "matrix": [[[-1.0, 0.0]]]},
//!     "b": {"type": "conjugated_phase", "V": [[[1.0, 0.0]]],
//!           "phases": [{"n": 1, "c": "pi", "sin": [0.5]}]}
//!   },
//!   "tolerances": {"cluster_eps": 1e-8}
//! }
//! ```
//!
//! Complex entries are `[re, im]`; the phase constant `c` is the string `"0"`
//! or `"pi"`. Vertex order in the file is the basis order.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, LoopError};
use crate::graph::{DoubleGraph, MolecularGraph};
use crate::linalg::CMatrix;
use crate::scattering::{ChannelPhase, PhaseConstant, ScatteringFamily};
use crate::tolerance::Tolerances;
use crate::unitary_loop::GraphLoop;

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub ends: [String; 2],
    pub length: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    pub n: i32,
    pub c: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    ConstantInvolution {
        matrix: ComplexRows,
    },
    ConjugatedPhase {
        #[serde(rename = "V")]
        basis: ComplexRows,
        phases: Vec<PhaseSpec>,
    },
}

/// On-disk form of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub scattering: BTreeMap<String, FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

/// A validated molecule with its vertex families.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: MolecularGraph,
    pub families: HashMap<String, ScatteringFamily>,
    pub tolerances: Tolerances,
}

fn matrix_from_rows(rows: &ComplexRows, field: &str) -> Result<CMatrix, Error> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Instance(format!("{field}: expected a non-empty square matrix")));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

fn rows_from_matrix(m: &CMatrix) -> ComplexRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl FamilySpec {
    pub fn build(&self, field: &str) -> Result<ScatteringFamily, Error> {
        let wrap = |e: crate::error::FamilyError, sub: &str| Error::Instance(format!("{field}{sub}: {e}"));
        match self {
            FamilySpec::ConstantInvolution { matrix } => {
                let m = matrix_from_rows(matrix, &format!("{field}.matrix"))?;
                ScatteringFamily::constant_involution(m).map_err(|e| wrap(e, ".matrix"))
            }
            FamilySpec::ConjugatedPhase { basis, phases } => {
                let v = matrix_from_rows(basis, &format!("{field}.V"))?;
                let chans = phases
                    .iter()
                    .enumerate()
                    .map(|(j, p)| {
                        let constant =
                            PhaseConstant::parse(&p.c).map_err(|e| wrap(e, &format!(".phases[{j}].c")))?;
                        Ok(ChannelPhase {
                            slope: p.n,
                            constant,
                            sines: p.sin.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>, Error>>()?;
                ScatteringFamily::conjugated_phase(v, chans).map_err(|e| wrap(e, ""))
            }
        }
    }

    pub fn from_family(f: &ScatteringFamily) -> Self {
        match f {
            ScatteringFamily::ConstantInvolution { matrix } => FamilySpec::ConstantInvolution {
                matrix: rows_from_matrix(matrix),
            },
            ScatteringFamily::ConjugatedPhase { basis, phases } => FamilySpec::ConjugatedPhase {
                basis: rows_from_matrix(basis),
                phases: phases
                    .iter()
                    .map(|p| PhaseSpec {
                        n: p.slope,
                        c: match p.constant {
                            PhaseConstant::Zero => "0".into(),
                            PhaseConstant::Pi => "pi".into(),
                        },
                        sin: p.sines.clone(),
                    })
                    .collect(),
            },
        }
    }
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance, Error> {
        let edges = self
            .edges
            .into_iter()
            .map(|e| {
                let [a, b] = e.ends;
                (a, b, e.length)
            })
            .collect();
        let graph = MolecularGraph::new(self.vertices, edges)?;
        let mut families = HashMap::with_capacity(self.scattering.len());
        for (v, spec) in &self.scattering {
            if graph.vertex_index(v).is_none() {
                return Err(Error::Instance(format!("scattering.{v}: unknown vertex")));
            }
            families.insert(v.clone(), spec.build(&format!("scattering.{v}"))?);
        }
        Ok(Instance {
            graph,
            families,
            tolerances: self.tolerances.unwrap_or_default(),
        })
    }
}

impl Instance {
    pub fn new(graph: MolecularGraph, families: HashMap<String, ScatteringFamily>) -> Self {
        Instance {
            graph,
            families,
            tolerances: Tolerances::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Instance(format!("parse error: {e}")))?;
        file.into_instance()
    }

    pub fn to_file(&self) -> InstanceFile {
        let g = &self.graph;
        InstanceFile {
            vertices: g.vertices().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeSpec {
                    ends: [g.vertices()[e.ends[0]].clone(), g.vertices()[e.ends[1]].clone()],
                    length: e.length as i64,
                })
                .collect(),
            scattering: self
                .families
                .iter()
                .map(|(v, f)| (v.clone(), FamilySpec::from_family(f)))
                .collect(),
            tolerances: (self.tolerances != Tolerances::default()).then_some(self.tolerances),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    pub fn double(&self) -> DoubleGraph {
        DoubleGraph::new(self.graph.clone())
    }

    pub fn graph_loop(&self) -> Result<GraphLoop, LoopError> {
        GraphLoop::new(self.double(), &self.families)
    }
}
