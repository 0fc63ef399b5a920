//! Named polytopes used throughout the test-suite and the CLI.

use crate::error::{Error, Result};
use crate::linalg::IVec;
use crate::polytope::LatticePolytope;

/// Names accepted by [`make`] without parameters.
pub const FIXED_NAMES: &[&str] = &["square", "P_fig1", "P_trap", "pyr4", "P_nonrig"];

/// `c · Δ_n`.
pub fn simplex(n: usize, c: i64) -> Result<LatticePolytope> {
    if n == 0 || c <= 0 {
        return Err(Error::DegenerateInput("simplex needs n ≥ 1 and c ≥ 1".into()));
    }
    let mut pts = vec![vec![0; n]];
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = c;
        pts.push(e);
    }
    Ok(LatticePolytope::hull(&pts)?.with_name(format!("simplex({n},{c})")))
}

/// The segment `[0, c]`.
pub fn segment(c: i64) -> Result<LatticePolytope> {
    Ok(LatticePolytope::hull(&[vec![0], vec![c]])?.with_name(format!("segment({c})")))
}

fn fixed_vertices(name: &str) -> Option<Vec<IVec>> {
    Some(match name {
        "square" => vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]],
        "P_fig1" => vec![
            vec![0, 0],
            vec![5, 0],
            vec![5, 2],
            vec![4, 3],
            vec![2, 3],
            vec![1, 2],
        ],
        "P_trap" => vec![vec![0, 0], vec![3, 0], vec![3, 2], vec![2, 2]],
        "pyr4" => vec![
            vec![0, 0, 0],
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![1, 1, 0],
            vec![0, 0, 1],
        ],
        "P_nonrig" => vec![
            vec![0, 0, 0],
            vec![2, 0, 0],
            vec![0, 2, 0],
            vec![0, 0, 1],
        ],
        _ => return None,
    })
}

/// Looks up a corpus member by name. Parameterized names are written
/// `simplex(n,c)` and `segment(c)`; `Delta_n` abbreviates `simplex(n,1)`.
pub fn make(name: &str) -> Result<LatticePolytope> {
    let trimmed: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(vs) = fixed_vertices(&trimmed) {
        return Ok(LatticePolytope::hull(&vs)?.with_name(trimmed));
    }
    if let Some(rest) = trimmed.strip_prefix("Delta_") {
        let n = rest.parse().map_err(|_| Error::UnknownName(name.into()))?;
        return simplex(n, 1);
    }
    let args = |prefix: &str| -> Option<Vec<i64>> {
        let inner = trimmed.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
        inner.split(',').map(|s| s.parse().ok()).collect()
    };
    if let Some(a) = args("simplex") {
        if let [n, c] = a[..] {
            if n > 0 {
                return simplex(n as usize, c);
            }
        }
    }
    if let Some(a) = args("segment") {
        if let [c] = a[..] {
            return segment(c);
        }
    }
    Err(Error::UnknownName(name.into()))
}

/// The named corpus: every fixed member plus a few simplices and segments.
pub fn named_corpus() -> Vec<LatticePolytope> {
    let names = [
        "square", "P_fig1", "P_trap", "pyr4", "P_nonrig", "simplex(1,1)", "simplex(1,2)",
        "simplex(2,1)", "simplex(2,2)", "simplex(3,1)", "segment(3)",
    ];
    names
        .iter()
        .map(|n| make(n).expect("corpus member"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        assert_eq!(make("simplex(1,2)").unwrap().lattice_points().len(), 3);
        assert_eq!(make("pyr4").unwrap().vertices().len(), 5);
        assert_eq!(make("Delta_3").unwrap().dim(), 3);
        assert!(matches!(make("dodecahedron"), Err(Error::UnknownName(_))));
        assert!(matches!(make("simplex(0,1)"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn trapezoid_facets() {
        let p = make("P_trap").unwrap();
        let mut fs: Vec<(IVec, i64)> = p
            .facets()
            .iter()
            .map(|f| (f.normal.clone(), f.offset))
            .collect();
        fs.sort();
        let mut want = vec![
            (vec![0, 1], 0),
            (vec![-1, 0], -3),
            (vec![0, -1], -2),
            (vec![1, -1], 0),
        ];
        want.sort();
        assert_eq!(fs, want);
    }
}
