//! TOML description of a system:
//!
//! ```toml
//! dimension = 1
//! [[maps]]
//! ratio = 0.3333333333333333
//! translation = [0.0]
//! [[maps]]
//! ratio = 0.3333333333333333
//! rotation = [1.0]          # row-major, identity when omitted
//! translation = [0.6666666666666666]
//! [open_set]                # {min, max}, {center, radius} or {vertices}
//! min = [0.0]
//! max = [1.0]
//! ```

use std::path::Path;

use serde::Deserialize;

use super::{IteratedFunctionSystem, OpenSet, SimilarityMap};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{AxisBox, Ball};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    dimension: usize,
    #[serde(default)]
    #[allow(dead_code)]
    name: Option<String>,
    maps: Vec<MapEntry>,
    open_set: OpenSetEntry,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapEntry {
    ratio: f64,
    rotation: Option<Vec<f64>>,
    translation: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum OpenSetEntry {
    Box { min: Vec<f64>, max: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

pub fn parse_system(text: &str) -> Result<IteratedFunctionSystem> {
    let file: SystemFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let d = file.dimension;
    let maps = file
        .maps
        .into_iter()
        .map(|m| {
            check_dim(d, m.translation.len())?;
            match m.rotation {
                Some(r) => SimilarityMap::new(m.ratio, r, m.translation),
                None => SimilarityMap::homothety(m.ratio, m.translation),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let open = match file.open_set {
        OpenSetEntry::Box { min, max } => OpenSet::Box(AxisBox::new(min, max)?),
        OpenSetEntry::Ball { center, radius } => OpenSet::Ball(Ball::new(center, radius)?),
        OpenSetEntry::Polygon { vertices } => OpenSet::Polygon(vertices),
    };
    check_dim(d, open.dim())?;
    IteratedFunctionSystem::new(maps, open)
}

pub fn read_system(path: impl AsRef<Path>) -> Result<IteratedFunctionSystem> {
    parse_system(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANTOR: &str = r#"
dimension = 1
name = "cantor"
[[maps]]
ratio = 0.3333333333333333
translation = [0.0]
[[maps]]
ratio = 0.3333333333333333
rotation = [1.0]
translation = [0.6666666666666666]
[open_set]
min = [0.0]
max = [1.0]
"#;

    #[test]
    fn parses_cantor() {
        let sys = parse_system(CANTOR).unwrap();
        assert_eq!(sys.maps().len(), 2);
        assert!((sys.delta() - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ball_and_polygon_witnesses() {
        let ball = CANTOR.replace("min = [0.0]\nmax = [1.0]", "center = [0.5]\nradius = 0.5");
        assert!(matches!(parse_system(&ball).unwrap().open_set(), OpenSet::Ball(_)));
        let gasket = r#"
dimension = 2
[[maps]]
ratio = 0.5
translation = [0.0, 0.0]
[[maps]]
ratio = 0.5
translation = [0.5, 0.0]
[[maps]]
ratio = 0.5
translation = [0.0, 0.5]
[open_set]
vertices = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
"#;
        assert!(matches!(parse_system(gasket).unwrap().open_set(), OpenSet::Polygon(_)));
    }

    #[test]
    fn dimension_mismatch_and_garbage() {
        let bad = CANTOR.replace("translation = [0.0]", "translation = [0.0, 0.0]");
        assert!(matches!(parse_system(&bad), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(parse_system("dimension = ["), Err(Error::Parse(_))));
        let typo = CANTOR.replace("ratio = 0.3333333333333333\ntranslation", "ratoi = 0.3\ntranslation");
        assert!(parse_system(&typo).is_err());
    }
}
