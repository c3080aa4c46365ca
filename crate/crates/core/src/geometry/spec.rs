use serde::{Deserialize, Serialize};

use super::body::{ConvexBody, HalfSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// JSON description of a body, e.g. `{"type": "ball", "center": [0, 0], "radius": 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodySpec {
    Polytope {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        halfspaces: Option<Vec<HalfSpaceSpec>>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
    },
    Simplex {
        dim: usize,
    },
    Cube {
        dim: usize,
    },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Polytope { vertices, halfspaces } => match (vertices, halfspaces) {
                (Some(v), None) => ConvexBody::from_vertices(v),
                (None, Some(h)) => ConvexBody::from_halfspaces(
                    h.iter()
                        .map(|s| HalfSpace::new(s.normal.clone(), s.offset))
                        .collect::<Result<Vec<_>>>()?,
                ),
                _ => Err(Error::Spec(
                    "polytope needs exactly one of `vertices` or `halfspaces`".into(),
                )),
            },
            BodySpec::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius),
            BodySpec::Box { min, max } => ConvexBody::axis_box(min.clone(), max.clone()),
            BodySpec::Simplex { dim } => ConvexBody::standard_simplex(*dim),
            BodySpec::Cube { dim } => {
                if *dim == 0 {
                    return Err(Error::Spec("cube dimension must be positive".into()));
                }
                Ok(ConvexBody::unit_cube(*dim))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_kinds() {
        let sq = BodySpec::from_json(r#"{"type": "polytope", "vertices": [[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        assert_eq!(sq.build().unwrap().volume(), 1.0);
        let b = BodySpec::from_json(r#"{"type": "ball", "center": [0, 0], "radius": 2}"#).unwrap();
        assert!((b.build().unwrap().volume() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let h = BodySpec::from_json(
            r#"{"type": "polytope", "halfspaces": [{"normal": [1], "offset": 1}, {"normal": [-1], "offset": 0}]}"#,
        )
        .unwrap();
        assert_eq!(h.build().unwrap().volume(), 1.0);
        assert!(BodySpec::from_json(r#"{"type": "ball", "center": [0], "radius": 1, "extra": 1}"#).is_err());
        assert!(BodySpec::from_json(r#"{"type": "polytope"}"#).unwrap().build().is_err());
    }
}
