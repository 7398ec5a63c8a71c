use std::cmp::Ordering;
use std::collections::HashMap;

use super::{distance, Ball};
use crate::error::{check_dim, Error, Result};

/// Every input ball lies in the `COVER_EXPANSION`-dilate of a chosen ball.
pub const COVER_EXPANSION: f64 = 3.0;

/// Disjoint sub-collection selected by [`greedy_cover`].
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub chosen: Vec<Ball>,
    /// Positions of the chosen balls in the input slice.
    pub indices: Vec<usize>,
}

impl Cover {
    pub fn expansion(&self) -> f64 {
        COVER_EXPANSION
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }
}

/// Greedy 3r covering lemma for balls of one common radius `r`.
///
/// Centers are visited in lexicographic order; a center is taken when it is
/// outside every closed `B(c_i, 2r)` already taken. Chosen centers are then
/// more than `2r` apart, so the chosen balls are disjoint, and every rejected
/// center is within `2r` of a chosen one, so its ball sits in that `3B`.
pub fn greedy_cover(balls: &[Ball]) -> Result<Cover> {
    let Some(first) = balls.first() else {
        return Ok(Cover {
            chosen: Vec::new(),
            indices: Vec::new(),
        });
    };
    let r = first.radius();
    let d = first.dim();
    for b in balls {
        check_dim(d, b.dim())?;
        if b.radius() != r {
            return Err(Error::precondition(format!(
                "greedy_cover needs a common radius, found {} and {}",
                r,
                b.radius()
            )));
        }
    }

    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(balls[a].center(), balls[b].center()).then(a.cmp(&b)));

    let cell = 2.0 * r;
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut indices = Vec::new();
    let offsets = neighbour_offsets(d);
    for i in order {
        let c = balls[i].center();
        let key: Vec<i64> = c.iter().map(|x| (x / cell).floor() as i64).collect();
        let blocked = offsets.iter().any(|off| {
            let probe: Vec<i64> = key.iter().zip(off).map(|(k, o)| k + o).collect();
            grid.get(&probe).is_some_and(|members| {
                members
                    .iter()
                    .any(|&j| distance(balls[j].center(), c) <= cell)
            })
        });
        if !blocked {
            grid.entry(key).or_default().push(i);
            indices.push(i);
        }
    }
    let chosen = indices.iter().map(|&i| balls[i].clone()).collect();
    Ok(Cover { chosen, indices })
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn neighbour_offsets(d: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(d)];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-1..=1).map(move |o| {
                    let mut p = prefix.clone();
                    p.push(o);
                    p
                })
            })
            .collect();
    }
    out
}
