//! Bundled self-similar systems, all satisfying the open set condition
//! for the witness given here.

use super::{IteratedFunctionSystem, OpenSet, SimilarityMap};
use crate::geometry::AxisBox;

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn homothety(r: f64, t: &[f64]) -> SimilarityMap {
    SimilarityMap::homothety(r, t.to_vec()).expect("valid bundled map")
}

fn rotation(deg: f64) -> Vec<f64> {
    let (s, c) = deg.to_radians().sin_cos();
    vec![c, -s, s, c]
}

/// Middle-third Cantor set, `delta = log 2 / log 3`.
pub fn cantor() -> IteratedFunctionSystem {
    let maps = vec![homothety(1.0 / 3.0, &[0.0]), homothety(1.0 / 3.0, &[2.0 / 3.0])];
    IteratedFunctionSystem::new(maps, OpenSet::Box(AxisBox::unit(1))).expect("cantor satisfies OSC")
}

/// Sierpinski gasket on the equilateral triangle with vertices (0,0), (1,0),
/// (1/2, sqrt 3 / 2); `delta = log 3 / log 2`.
pub fn sierpinski_gasket() -> IteratedFunctionSystem {
    let maps = vec![
        homothety(0.5, &[0.0, 0.0]),
        homothety(0.5, &[0.5, 0.0]),
        homothety(0.5, &[0.25, SQRT3 / 4.0]),
    ];
    let open = OpenSet::Polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.5, SQRT3 / 2.0]]);
    IteratedFunctionSystem::new(maps, open).expect("gasket satisfies OSC")
}

/// Four-corner Cantor dust with contraction 1/4, `delta = 1`.
pub fn cantor_dust() -> IteratedFunctionSystem {
    let c = 0.25;
    let maps = [[0.0, 0.0], [1.0 - c, 0.0], [0.0, 1.0 - c], [1.0 - c, 1.0 - c]]
        .iter()
        .map(|t| homothety(c, t))
        .collect();
    IteratedFunctionSystem::new(maps, OpenSet::Box(AxisBox::unit(2))).expect("dust satisfies OSC")
}

/// Von Koch curve from (0,0) to (1,0), `delta = log 4 / log 3`.
pub fn von_koch() -> IteratedFunctionSystem {
    let r = 1.0 / 3.0;
    let maps = vec![
        homothety(r, &[0.0, 0.0]),
        SimilarityMap::new(r, rotation(60.0), vec![1.0 / 3.0, 0.0]).expect("rotation"),
        SimilarityMap::new(r, rotation(-60.0), vec![0.5, SQRT3 / 6.0]).expect("rotation"),
        homothety(r, &[2.0 / 3.0, 0.0]),
    ];
    let open = OpenSet::Polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.5, SQRT3 / 6.0]]);
    IteratedFunctionSystem::new(maps, open).expect("koch satisfies OSC")
}

pub const NAMES: [&str; 4] = ["cantor", "gasket", "dust", "koch"];

pub fn by_name(name: &str) -> Option<IteratedFunctionSystem> {
    match name {
        "cantor" => Some(cantor()),
        "gasket" => Some(sierpinski_gasket()),
        "dust" => Some(cantor_dust()),
        "koch" => Some(von_koch()),
        _ => None,
    }
}

pub fn all() -> Vec<IteratedFunctionSystem> {
    NAMES.iter().filter_map(|n| by_name(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let expect = [2f64.ln() / 3f64.ln(), 3f64.ln() / 2f64.ln(), 1.0, 4f64.ln() / 3f64.ln()];
        for (sys, e) in all().iter().zip(expect) {
            assert!((sys.delta() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn koch_maps_chain_endpoints() {
        let sys = von_koch();
        let m = sys.maps();
        let ends = |i: usize| (m[i].apply(&[0.0, 0.0]), m[i].apply(&[1.0, 0.0]));
        for i in 0..3 {
            let (_, e) = ends(i);
            let (s, _) = ends(i + 1);
            assert!(crate::geometry::distance(&e, &s) < 1e-15);
        }
        assert!(crate::geometry::distance(&ends(3).1, &[1.0, 0.0]) < 1e-15);
    }

    #[test]
    fn unknown_name() {
        assert!(by_name("mandelbrot").is_none());
    }
}
