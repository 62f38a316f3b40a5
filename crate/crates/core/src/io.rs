//! Versioned JSON surface documents.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scalar::{Field, Scalar};
use crate::surface::{CoverInfo, FlatSurface, Gluing, Involution, Kind, Marking};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldDoc {
    Named(String),
    Quadratic { #[serde(rename = "D")] d: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkingDoc {
    pub name: String,
    pub cell: usize,
    pub x: Scalar,
    pub y: Scalar,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub puncture: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringDoc {
    pub base_hash: String,
    pub ramification: Vec<String>,
    pub sheet_map: Vec<(usize, u8)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvolutionDoc {
    pub cell_map: Vec<usize>,
    pub offset: Vec<[Scalar; 2]>,
    pub linear: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDoc {
    pub version: u32,
    pub kind: Kind,
    pub field: FieldDoc,
    pub cells: Vec<Vec<[Scalar; 2]>>,
    pub gluings: Vec<[usize; 4]>,
    #[serde(default)]
    pub markings: Vec<MarkingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering: Option<CoveringDoc>,
}

fn vec_doc(v: &Vec2) -> [Scalar; 2] {
    [v.x, v.y]
}

fn doc_vec(v: &[Scalar; 2]) -> Vec2 {
    Vec2::new(v[0], v[1])
}

impl SurfaceDoc {
    pub fn from_surface(s: &FlatSurface) -> SurfaceDoc {
        SurfaceDoc {
            version: FORMAT_VERSION,
            kind: s.kind(),
            field: match s.field() {
                Field::Rational => FieldDoc::Named("rational".into()),
                Field::Quadratic(d) => FieldDoc::Quadratic { d },
            },
            cells: s.cells().iter().map(|c| c.iter().map(vec_doc).collect()).collect(),
            gluings: s
                .gluings()
                .iter()
                .map(|g| [g.cell, g.edge, g.other_cell, g.other_edge])
                .collect(),
            markings: s
                .markings()
                .iter()
                .map(|m| MarkingDoc {
                    name: m.name.clone(),
                    cell: m.cell,
                    x: m.pos.x,
                    y: m.pos.y,
                    puncture: m.puncture,
                })
                .collect(),
            vertex_names: Some(s.cones().iter().map(|c| c.name.clone()).collect()),
            involution: s.involution().map(|inv| InvolutionDoc {
                cell_map: inv.cell_map.clone(),
                offset: inv.offset.iter().map(vec_doc).collect(),
                linear: inv.linear,
            }),
            covering: s.cover_info().map(|c| CoveringDoc {
                base_hash: c.base_hash.clone(),
                ramification: c.ramification.clone(),
                sheet_map: c.sheet_map.clone(),
            }),
        }
    }

    pub fn build(&self) -> Result<FlatSurface> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported format version {}", self.version)));
        }
        let declared = match &self.field {
            FieldDoc::Named(n) if n == "rational" => Field::Rational,
            FieldDoc::Named(n) => return Err(Error::Parse(format!("unknown field {n:?}"))),
            FieldDoc::Quadratic { d } => Field::quadratic(*d)?,
        };
        let cells: Vec<Vec<Vec2>> =
            self.cells.iter().map(|c| c.iter().map(doc_vec).collect()).collect();
        let gluings: Vec<Gluing> =
            self.gluings.iter().map(|g| Gluing::new(g[0], g[1], g[2], g[3])).collect();
        let markings: Vec<Marking> = self
            .markings
            .iter()
            .map(|m| Marking {
                name: m.name.clone(),
                cell: m.cell,
                pos: Vec2::new(m.x, m.y),
                puncture: m.puncture,
            })
            .collect();
        let mut s = FlatSurface::build(cells, &gluings, self.kind, markings)?;
        if declared.join(s.field()) != Some(declared) {
            return Err(Error::MixedFields);
        }
        if let Some(names) = &self.vertex_names {
            if names.len() != s.num_vertices() {
                return Err(Error::Parse(format!(
                    "{} vertex names for {} vertices",
                    names.len(),
                    s.num_vertices()
                )));
            }
        }
        if let Some(inv) = &self.involution {
            let n = s.cells().len();
            if inv.cell_map.len() != n || inv.offset.len() != n || inv.cell_map.iter().any(|&c| c >= n) {
                return Err(Error::Parse("involution does not match cells".into()));
            }
            s.set_involution(Involution {
                cell_map: inv.cell_map.clone(),
                offset: inv.offset.iter().map(doc_vec).collect(),
                linear: inv.linear,
            });
        }
        s.restore(
            self.vertex_names.clone(),
            self.covering.as_ref().map(|c| CoverInfo {
                base_hash: c.base_hash.clone(),
                ramification: c.ramification.clone(),
                sheet_map: c.sheet_map.clone(),
            }),
        );
        Ok(s)
    }
}

pub fn to_json(s: &FlatSurface) -> String {
    serde_json::to_string_pretty(&SurfaceDoc::from_surface(s)).expect("surface serializes")
}

pub fn from_json(text: &str) -> Result<FlatSurface> {
    let doc: SurfaceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.build()
}

/// Hex SHA-256 of the canonical JSON of a surface.
pub fn surface_hash(s: &FlatSurface) -> String {
    let digest = Sha256::digest(to_json(s).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
