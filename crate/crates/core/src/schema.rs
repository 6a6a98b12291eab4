//! Versioned JSON input format.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "model": "body-bar",
//!   "group": {"orders": [2]},
//!   "representation": {"d": 3, "generators": [[["1","0","0"],["0","1","0"],["0","0","-1"]]]},
//!   "vertices": ["u"],
//!   "edges": [{"id": 0, "tail": "u", "head": "u", "gain": [1], "inL": true}],
//!   "configuration": {"bars": [{"points": [[1,2,3,1],[1,2,-3,1]]}]}
//! }
//! ```
//!
//! Scalars are integers or strings `"p/q"`. Points may omit the trailing
//! homogeneous `1`. A bar is given either by two points or by its six (in
//! general `C(d+1,2)`) Plücker coordinates.

use serde::{Deserialize, Serialize};

use crate::algebra::{binomial, Extensor};
use crate::error::{Error, Result};
use crate::gaingraph::{GainEdge, GainGraph};
use crate::hinge::{Hinge, HingeConfiguration};
use crate::linalg::Matrix;
use crate::rigidity::{Bar, BarConfiguration};
use crate::scalar::{int, parse_rational, rational_to_string, Rational};
use crate::symmetry::{AbelianGroup, GroupElement, PointRepresentation};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    #[default]
    BodyBar,
    BodyHinge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    fn parse(&self) -> Result<Rational> {
        match self {
            Scalar::Int(v) => Ok(int(*v)),
            Scalar::Text(s) => {
                parse_rational(s).ok_or_else(|| Error::Input(format!("{s:?} is not a rational number")))
            }
        }
    }

    pub fn from_rational(q: &Rational) -> Self {
        match (q.is_integer(), i64::try_from(q.numer())) {
            (true, Ok(v)) => Scalar::Int(v),
            _ => Scalar::Text(rational_to_string(q)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub orders: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationSpec {
    pub d: usize,
    pub generators: Vec<Vec<Vec<Scalar>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: u32,
    pub tail: String,
    pub head: String,
    pub gain: Vec<i64>,
    #[serde(rename = "inL", default)]
    pub in_l: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plucker: Option<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HingeSpec {
    pub points: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bars: Option<Vec<BarSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hinges: Option<Vec<HingeSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub schema: u32,
    #[serde(default)]
    pub model: Model,
    pub group: GroupSpec,
    pub representation: RepresentationSpec,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configuration: Option<ConfigurationSpec>,
}

/// A validated framework description.
#[derive(Clone, Debug)]
pub struct Framework {
    pub model: Model,
    pub rep: PointRepresentation,
    pub graph: GainGraph,
    pub bars: Option<BarConfiguration>,
    pub hinges: Option<HingeConfiguration>,
}

fn point(coords: &[Scalar], d: usize) -> Result<Vec<Rational>> {
    let mut p = coords.iter().map(Scalar::parse).collect::<Result<Vec<_>>>()?;
    if p.len() == d {
        p.push(int(1));
    }
    if p.len() != d + 1 {
        return Err(Error::Dimension {
            expected: d + 1,
            found: p.len(),
        });
    }
    Ok(p)
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_framework(self) -> Result<Framework> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Input(format!(
                "schema version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        let group = AbelianGroup::new(self.group.orders)?;
        let d = self.representation.d;
        if d == 0 {
            return Err(Error::Input("dimension d must be positive".into()));
        }
        let generators = self
            .representation
            .generators
            .iter()
            .enumerate()
            .map(|(t, rows)| {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Representation(format!("generator {t} is not {d}x{d}")));
                }
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(Scalar::parse).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(Matrix::from_rows(rows, d))
            })
            .collect::<Result<Vec<_>>>()?;
        let rep = PointRepresentation::new(group.clone(), d, generators)?;

        let vertex = |name: &str| {
            self.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Input(format!("unknown vertex {name:?}")))
        };
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let gain = group
                    .element(&e.gain)
                    .map_err(|_| Error::Input(format!("edge {}: gain {:?} does not fit the group", e.id, e.gain)))?;
                Ok(GainEdge::new(e.id, vertex(&e.tail)?, vertex(&e.head)?, gain).in_l(e.in_l))
            })
            .collect::<Result<Vec<_>>>()?;
        let graph = GainGraph::new(group, self.vertices.clone(), edges)?;

        let config = self.configuration.unwrap_or_default();
        let bars = config
            .bars
            .map(|specs| {
                if specs.len() != graph.edge_count() {
                    return Err(Error::Input(format!(
                        "{} bars for {} edges",
                        specs.len(),
                        graph.edge_count()
                    )));
                }
                let bars = specs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| match (&s.points, &s.plucker) {
                        (Some(pts), None) if pts.len() == 2 => {
                            Bar::through(point(&pts[0], d)?, point(&pts[1], d)?)
                        }
                        (None, Some(coords)) => {
                            let coords = coords.iter().map(Scalar::parse).collect::<Result<Vec<_>>>()?;
                            Ok(Bar::from_extensor(Extensor::new(d, 2, coords)?))
                        }
                        _ => Err(Error::Input(format!(
                            "bar {i} needs either two points or {} Plücker coordinates",
                            binomial(d + 1, 2)
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                BarConfiguration::new(d, bars)
            })
            .transpose()?;
        let hinges = config
            .hinges
            .map(|specs| {
                if specs.len() != graph.edge_count() {
                    return Err(Error::Input(format!(
                        "{} hinges for {} edges",
                        specs.len(),
                        graph.edge_count()
                    )));
                }
                let hinges = specs
                    .iter()
                    .map(|s| {
                        let pts = s.points.iter().map(|p| point(p, d)).collect::<Result<Vec<_>>>()?;
                        Hinge::through(pts, d)
                    })
                    .collect::<Result<Vec<_>>>()?;
                HingeConfiguration::new(d, hinges)
            })
            .transpose()?;
        match self.model {
            Model::BodyBar if hinges.is_some() => {
                return Err(Error::Input("hinges given for a body-bar model".into()))
            }
            Model::BodyHinge if bars.is_some() => {
                return Err(Error::Input("bars given for a body-hinge model".into()))
            }
            _ => {}
        }
        Ok(Framework {
            model: self.model,
            rep,
            graph,
            bars,
            hinges,
        })
    }
}

impl Framework {
    pub fn from_json(text: &str) -> Result<Self> {
        InputDocument::parse(text)?.into_framework()
    }

    /// Serializes back to the input format.
    pub fn to_document(&self) -> InputDocument {
        let d = self.rep.dim();
        let scalars = |v: &[Rational]| v.iter().map(Scalar::from_rational).collect::<Vec<_>>();
        let name = |i: usize| self.graph.vertex_names()[i].clone();
        let configuration = match (&self.bars, &self.hinges) {
            (None, None) => None,
            (bars, hinges) => Some(ConfigurationSpec {
                bars: bars.as_ref().map(|c| {
                    c.bars()
                        .iter()
                        .map(|b| match &b.points {
                            Some((p, q)) => BarSpec {
                                points: Some(vec![scalars(p), scalars(q)]),
                                plucker: None,
                            },
                            None => BarSpec {
                                points: None,
                                plucker: Some(scalars(b.extensor.coords())),
                            },
                        })
                        .collect()
                }),
                hinges: hinges.as_ref().map(|c| {
                    c.hinges()
                        .iter()
                        .map(|h| HingeSpec {
                            points: h.points.iter().map(|p| scalars(p)).collect(),
                        })
                        .collect()
                }),
            }),
        };
        InputDocument {
            schema: SCHEMA_VERSION,
            model: self.model,
            group: GroupSpec {
                orders: self.rep.group().orders().to_vec(),
            },
            representation: RepresentationSpec {
                d,
                generators: self
                    .rep
                    .generators()
                    .iter()
                    .map(|g| g.rows().map(scalars).collect())
                    .collect(),
            },
            vertices: self.graph.vertex_names().to_vec(),
            edges: self
                .graph
                .edges()
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.0,
                    tail: name(e.tail),
                    head: name(e.head),
                    gain: e.gain.0.iter().map(|&c| c as i64).collect(),
                    in_l: e.in_l,
                })
                .collect(),
            configuration,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable document")
    }
}

/// Parses an irrep label such as `"1"` or `"1,0"`.
pub fn parse_irrep(group: &AbelianGroup, text: &str) -> Result<GroupElement> {
    let comps = text
        .trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| Error::Input(format!("irrep label {text:?} is not a list of integers")))
        })
        .collect::<Result<Vec<_>>>()?;
    let in_range = comps.len() == group.rank()
        && comps.iter().zip(group.orders()).all(|(&c, &k)| (0..k as i64).contains(&c));
    if !in_range {
        return Err(Error::Input(format!(
            "irrep label {text:?} is not an element of the group with orders {:?}",
            group.orders()
        )));
    }
    group.element(&comps)
}
