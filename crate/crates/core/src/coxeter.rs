//! Labeled-polyhedron combinatorics and Coxeter-system machinery.
//!
//! Two polyhedra drive the pipeline: a tetrahedron (a cone over a triangle)
//! whose edge labels are `{2,3,7,7,x,7}`, and a double cone over a triangle
//! with six faces, nine labeled edges and five vertices. Each yields a Coxeter
//! matrix; non-adjacent face pairs carry no relation (label ∞). Finite
//! parabolic subsets are classified by positive definiteness of the cosine
//! matrix, with exact confirmation at low rank, and their abstract orders come
//! from decomposing the Coxeter diagram into irreducible blocks.

use nalgebra::DMatrix;
use num::rational::Ratio;

use crate::error::Error;
use crate::Result;

/// Eigenvalue tolerance for the positive-definiteness test.
pub const FINITENESS_EIGEN_TOL: f64 = 1e-10;

/// An edge of a labeled polyhedron: an unordered face pair with an integer
/// dihedral-angle label `m ≥ 2` (angle `π/m`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub faces: (usize, usize),
    pub label: u32,
}

/// Face/edge/vertex combinatorics of a labeled polyhedron.
#[derive(Clone, Debug)]
pub struct LabeledPolyhedron {
    faces: Vec<String>,
    edges: Vec<Edge>,
    vertices: Vec<Vec<usize>>,
}

impl LabeledPolyhedron {
    /// Validates the combinatorics: distinct unordered face pairs, labels
    /// `≥ 2`, in-range indices, and the Euler relation `V - E + F = 2`.
    pub fn new(faces: Vec<String>, edges: Vec<Edge>, vertices: Vec<Vec<usize>>) -> Result<Self> {
        let n = faces.len();
        let mut seen_pairs = std::collections::HashSet::new();
        for e in &edges {
            let (i, j) = e.faces;
            if i == j || i >= n || j >= n {
                return Err(Error::InvalidInput(format!("bad edge face pair ({i}, {j})")));
            }
            if e.label < 2 {
                return Err(Error::InvalidInput(format!("edge label {} < 2", e.label)));
            }
            if !seen_pairs.insert((i.min(j), i.max(j))) {
                return Err(Error::InvalidInput(format!("duplicate edge ({i}, {j})")));
            }
        }
        for v in &vertices {
            if v.iter().any(|&i| i >= n) {
                return Err(Error::InvalidInput("vertex references unknown face".into()));
            }
        }
        let euler = vertices.len() as i64 - edges.len() as i64 + n as i64;
        if euler != 2 {
            return Err(Error::InvalidInput(format!(
                "Euler relation violated: V - E + F = {euler}, expected 2"
            )));
        }
        Ok(LabeledPolyhedron { faces, edges, vertices })
    }

    pub fn faces(&self) -> &[String] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertices(&self) -> &[Vec<usize>] {
        &self.vertices
    }

    /// Label of the edge between two faces, if they are adjacent.
    pub fn edge_label(&self, i: usize, j: usize) -> Option<u32> {
        self.edges
            .iter()
            .find(|e| e.faces == (i, j) || e.faces == (j, i))
            .map(|e| e.label)
    }

    /// The labels of the edges incident to a vertex (edges whose two faces
    /// both contain the vertex), in edge-list order.
    pub fn vertex_labels(&self, vertex: usize) -> Vec<u32> {
        let faces = &self.vertices[vertex];
        self.edges
            .iter()
            .filter(|e| faces.contains(&e.faces.0) && faces.contains(&e.faces.1))
            .map(|e| e.label)
            .collect()
    }
}

/// A symmetric Coxeter matrix: diagonal 1, off-diagonal `≥ 2` or `None` for ∞
/// (no relation between the two generators).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterMatrix {
    rank: usize,
    entries: Vec<Vec<Option<u32>>>,
}

impl CoxeterMatrix {
    /// Builds a rank-`rank` matrix with all off-diagonal entries ∞, to be
    /// filled in with [`set_label`](Self::set_label).
    pub fn unrelated(rank: usize) -> Self {
        let mut entries = vec![vec![None; rank]; rank];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = Some(1);
        }
        CoxeterMatrix { rank, entries }
    }

    pub fn set_label(&mut self, i: usize, j: usize, m: u32) -> Result<()> {
        if i == j || i >= self.rank || j >= self.rank {
            return Err(Error::InvalidInput(format!("bad Coxeter index pair ({i}, {j})")));
        }
        if m < 2 {
            return Err(Error::InvalidInput(format!("Coxeter label {m} < 2")));
        }
        self.entries[i][j] = Some(m);
        self.entries[j][i] = Some(m);
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Entry `m[i][j]`; `None` means ∞.
    pub fn label(&self, i: usize, j: usize) -> Option<u32> {
        self.entries[i][j]
    }

    /// Pairs `(i, j)` with `i < j` and no relation (entry ∞).
    pub fn unrelated_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.rank {
            for j in (i + 1)..self.rank {
                if self.entries[i][j].is_none() {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// The cosine matrix of a generator subset: entries `-cos(π/m)`, with ∞
    /// mapped to `-1`.
    pub fn cosine_matrix(&self, subset: &[usize]) -> DMatrix<f64> {
        let k = subset.len();
        DMatrix::from_fn(k, k, |a, b| {
            if a == b {
                1.0
            } else {
                match self.entries[subset[a]][subset[b]] {
                    Some(m) => -(std::f64::consts::PI / m as f64).cos(),
                    None => -1.0,
                }
            }
        })
    }

    /// Renders the group presentation: generator involutions followed by one
    /// braid relation per finite off-diagonal entry, in row-major order.
    pub fn presentation(&self, names: &[String]) -> String {
        let gens = names.join(", ");
        let mut relations: Vec<String> = vec![names
            .iter()
            .map(|n| format!("{n}^2"))
            .collect::<Vec<_>>()
            .join(" = ")
            + " = 1"];
        for i in 0..self.rank {
            for j in (i + 1)..self.rank {
                if let Some(m) = self.entries[i][j] {
                    relations.push(format!("({} {})^{} = 1", names[i], names[j], m));
                }
            }
        }
        format!("< {} | {} >", gens, relations.join(", "))
    }
}

/// A generator subset classified as finite, with its abstract order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicSubset {
    pub indices: Vec<usize>,
    pub order: u64,
}

/// Builds the labeled tetrahedron (a cone over a triangle) together with its
/// Coxeter matrix.
///
/// Faces `r1..r4`; the cone-point edges carry labels 2, 3, 7 and the base
/// edges 7, `x`, 7, so the vertex types are `[2,3,7]`, `[x,3,7]`, `[7,7,7]`
/// and `[x,2,7]`.
pub fn build_tetrahedron(x: u32) -> Result<(LabeledPolyhedron, CoxeterMatrix)> {
    if x < 2 {
        return Err(Error::InvalidInput(format!("label x = {x} must be at least 2")));
    }
    let faces: Vec<String> = ["r1", "r2", "r3", "r4"].iter().map(|s| s.to_string()).collect();
    let edge_data = [
        ((0, 1), 2),
        ((1, 2), 3),
        ((2, 0), 7),
        ((0, 3), 7),
        ((1, 3), x),
        ((2, 3), 7),
    ];
    let edges = edge_data
        .iter()
        .map(|&(faces, label)| Edge { faces, label })
        .collect();
    let vertices = vec![vec![0, 1, 2], vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3]];
    let polyhedron = LabeledPolyhedron::new(faces, edges, vertices)?;
    let mut cm = CoxeterMatrix::unrelated(4);
    for e in polyhedron.edges() {
        cm.set_label(e.faces.0, e.faces.1, e.label)?;
    }
    Ok((polyhedron, cm))
}

/// Builds the labeled double cone over a triangle together with its Coxeter
/// matrix.
///
/// Faces `r1, r2, r3` around the upper cone point and `r1', r2', r3'` around
/// the lower one. Upper and lower cone edges carry `p, q, r` cyclically, and
/// the equatorial edges pair `r1` with `r2'` (label `p`), `r2` with `r3'`
/// (label `q`) and `r3` with `r1'` (label `r`). The six remaining face pairs
/// are non-adjacent and receive no relation.
pub fn build_double_cone(p: u32, q: u32, r: u32) -> Result<(LabeledPolyhedron, CoxeterMatrix)> {
    check_hyperbolic(p, q, r)?;
    let faces: Vec<String> = ["r1", "r2", "r3", "r1'", "r2'", "r3'"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let edge_data = [
        ((0, 1), p),
        ((1, 2), q),
        ((2, 0), r),
        ((3, 4), p),
        ((4, 5), q),
        ((5, 3), r),
        ((0, 4), p),
        ((1, 5), q),
        ((2, 3), r),
    ];
    let edges = edge_data
        .iter()
        .map(|&(faces, label)| Edge { faces, label })
        .collect();
    let vertices = vec![
        vec![0, 1, 2],
        vec![3, 4, 5],
        vec![0, 1, 4, 5],
        vec![1, 2, 3, 5],
        vec![0, 2, 3, 4],
    ];
    let polyhedron = LabeledPolyhedron::new(faces, edges, vertices)?;
    let mut cm = CoxeterMatrix::unrelated(6);
    for e in polyhedron.edges() {
        cm.set_label(e.faces.0, e.faces.1, e.label)?;
    }
    Ok((polyhedron, cm))
}

/// Rejects signatures that are not hyperbolic (`1/p + 1/q + 1/r ≥ 1`).
pub fn check_hyperbolic(p: u32, q: u32, r: u32) -> Result<()> {
    if p < 2 || q < 2 || r < 2 {
        return Err(Error::InvalidInput(format!("labels ({p},{q},{r}) must be at least 2")));
    }
    let sum = Ratio::new(1i64, p as i64) + Ratio::new(1, q as i64) + Ratio::new(1, r as i64);
    if sum >= Ratio::new(1, 1) {
        return Err(Error::InvalidInput(format!(
            "signature ({p},{q},{r}) is not hyperbolic: 1/p + 1/q + 1/r = {sum} >= 1"
        )));
    }
    Ok(())
}

/// Enumerates all finite parabolic subsets of a Coxeter matrix with their
/// abstract orders, in order of (size, indices).
///
/// A subset is finite iff its cosine matrix is positive definite; for rank
/// ≤ 3 the verdict is cross-checked exactly (finite labels at rank 2; the
/// angle-sum inequality `1/a + 1/b + 1/c > 1` at rank 3). Orders come from
/// decomposing the Coxeter diagram into irreducible blocks.
pub fn finite_parabolics(cm: &CoxeterMatrix) -> Result<Vec<ParabolicSubset>> {
    if cm.rank() > 8 {
        return Err(Error::InvalidInput(format!(
            "rank {} exceeds the supported parabolic enumeration rank 8",
            cm.rank()
        )));
    }
    let mut subsets: Vec<Vec<usize>> = (0u32..(1 << cm.rank()))
        .map(|mask| (0..cm.rank()).filter(|&i| mask >> i & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| (a.len(), a.clone()).cmp(&(b.len(), b.clone())));

    let mut finite = Vec::new();
    for subset in subsets {
        let pd = is_positive_definite(&cm.cosine_matrix(&subset));
        if let Some(exact) = exact_finiteness(cm, &subset) {
            if exact != pd {
                return Err(Error::Internal(format!(
                    "finiteness disagreement on subset {subset:?}: eigenvalue test {pd}, exact rule {exact}"
                )));
            }
        }
        if pd {
            let order = block_order(cm, &subset)?;
            finite.push(ParabolicSubset { indices: subset, order });
        }
    }
    Ok(finite)
}

fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    if m.nrows() == 0 {
        return true;
    }
    let eigen = m.clone().symmetric_eigen();
    eigen.eigenvalues.iter().all(|&l| l > FINITENESS_EIGEN_TOL)
}

/// Exact finiteness rule where one applies: any subset containing an ∞ pair is
/// infinite; rank ≤ 1 is finite; rank 2 is finite iff the label is finite;
/// rank 3 is finite iff `1/a + 1/b + 1/c > 1` over the three pair labels.
fn exact_finiteness(cm: &CoxeterMatrix, subset: &[usize]) -> Option<bool> {
    for (a, &i) in subset.iter().enumerate() {
        for &j in &subset[a + 1..] {
            if cm.label(i, j).is_none() {
                return Some(false);
            }
        }
    }
    match subset.len() {
        0 | 1 => Some(true),
        2 => Some(true),
        3 => {
            let labels = [
                cm.label(subset[0], subset[1]).unwrap(),
                cm.label(subset[1], subset[2]).unwrap(),
                cm.label(subset[0], subset[2]).unwrap(),
            ];
            let sum: Ratio<i64> = labels.iter().map(|&m| Ratio::new(1i64, m as i64)).sum();
            Some(sum > Ratio::new(1, 1))
        }
        _ => None,
    }
}

/// Abstract order of a finite parabolic by irreducible-block decomposition.
///
/// Supported blocks: a single generator (order 2), a connected pair with
/// label `m` (order `2m`), and the three rank-3 paths with edge labels
/// `{3,3}`, `{3,4}`, `{3,5}` (orders 24, 48, 120).
fn block_order(cm: &CoxeterMatrix, subset: &[usize]) -> Result<u64> {
    let k = subset.len();
    // Diagram adjacency: an edge iff the label differs from 2.
    let connected = |a: usize, b: usize| cm.label(subset[a], subset[b]) != Some(2);
    let mut component = vec![usize::MAX; k];
    let mut count = 0;
    for start in 0..k {
        if component[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        component[start] = count;
        while let Some(a) = stack.pop() {
            for b in 0..k {
                if a != b && component[b] == usize::MAX && connected(a, b) {
                    component[b] = count;
                    stack.push(b);
                }
            }
        }
        count += 1;
    }
    let mut order = 1u64;
    for c in 0..count {
        let block: Vec<usize> = (0..k).filter(|&a| component[a] == c).collect();
        let block_labels: Vec<u32> = {
            let mut ls = Vec::new();
            for (a, &i) in block.iter().enumerate() {
                for &j in &block[a + 1..] {
                    match cm.label(subset[i], subset[j]) {
                        Some(2) => {}
                        Some(m) => ls.push(m),
                        None => {
                            return Err(Error::Internal(
                                "infinite label inside a finite-classified block".into(),
                            ))
                        }
                    }
                }
            }
            ls.sort_unstable();
            ls
        };
        order *= match (block.len(), block_labels.as_slice()) {
            (1, []) => 2,
            (2, [m]) => 2 * *m as u64,
            (3, [3, 3]) => 24,
            (3, [3, 4]) => 48,
            (3, [3, 5]) => 120,
            (len, labels) => {
                return Err(Error::UnsupportedBlock(format!(
                    "rank-{len} block with labels {labels:?}"
                )))
            }
        };
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<u32>) -> Vec<u32> {
        v.sort_unstable();
        v
    }

    #[test]
    fn tetrahedron_combinatorics() {
        let (poly, cm) = build_tetrahedron(7).unwrap();
        assert_eq!(poly.faces().len(), 4);
        assert_eq!(poly.edges().len(), 6);
        assert_eq!(poly.vertices().len(), 4);
        // Vertex types for x = 7.
        let types: Vec<Vec<u32>> = (0..4).map(|v| sorted(poly.vertex_labels(v))).collect();
        assert_eq!(types[0], vec![2, 3, 7]);
        assert_eq!(types[1], vec![3, 7, 7]);
        assert_eq!(types[2], vec![7, 7, 7]);
        assert_eq!(types[3], vec![2, 7, 7]);
        assert_eq!(cm.unrelated_pairs(), Vec::<(usize, usize)>::new());
    }

    #[test]
    fn tetrahedron_vertex_types_any_x() {
        for x in 2..=12 {
            let (poly, _) = build_tetrahedron(x).unwrap();
            assert_eq!(sorted(poly.vertex_labels(0)), vec![2, 3, 7]);
            assert_eq!(sorted(poly.vertex_labels(1)), sorted(vec![x, 3, 7]));
            assert_eq!(sorted(poly.vertex_labels(2)), vec![7, 7, 7]);
            assert_eq!(sorted(poly.vertex_labels(3)), sorted(vec![x, 2, 7]));
        }
    }

    #[test]
    fn tetrahedron_rejects_small_x() {
        assert!(matches!(build_tetrahedron(1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn tetrahedron_presentation_string() {
        let (poly, cm) = build_tetrahedron(5).unwrap();
        let names: Vec<String> = poly.faces().to_vec();
        assert_eq!(
            cm.presentation(&names),
            "< r1, r2, r3, r4 | r1^2 = r2^2 = r3^2 = r4^2 = 1, \
             (r1 r2)^2 = 1, (r1 r3)^7 = 1, (r1 r4)^7 = 1, \
             (r2 r3)^3 = 1, (r2 r4)^5 = 1, (r3 r4)^7 = 1 >"
        );
    }

    #[test]
    fn double_cone_combinatorics() {
        let (poly, cm) = build_double_cone(2, 3, 7).unwrap();
        assert_eq!(poly.faces().len(), 6);
        assert_eq!(poly.edges().len(), 9);
        assert_eq!(poly.vertices().len(), 5);
        // Cone points and equatorial vertex types.
        assert_eq!(sorted(poly.vertex_labels(0)), vec![2, 3, 7]);
        assert_eq!(sorted(poly.vertex_labels(1)), vec![2, 3, 7]);
        assert_eq!(sorted(poly.vertex_labels(2)), vec![2, 2, 3, 3]);
        assert_eq!(sorted(poly.vertex_labels(3)), vec![3, 3, 7, 7]);
        assert_eq!(sorted(poly.vertex_labels(4)), vec![2, 2, 7, 7]);
        // Exactly the six non-adjacent pairs carry no relation.
        assert_eq!(
            cm.unrelated_pairs(),
            vec![(0, 3), (0, 5), (1, 3), (1, 4), (2, 4), (2, 5)]
        );
    }

    #[test]
    fn double_cone_equatorial_types_generic() {
        for (p, q, r) in [(2u32, 3, 7), (2, 4, 5), (3, 3, 4), (2, 3, 8)] {
            let (poly, _) = build_double_cone(p, q, r).unwrap();
            assert_eq!(sorted(poly.vertex_labels(2)), sorted(vec![p, p, q, q]));
            assert_eq!(sorted(poly.vertex_labels(3)), sorted(vec![q, q, r, r]));
            assert_eq!(sorted(poly.vertex_labels(4)), sorted(vec![r, r, p, p]));
        }
    }

    #[test]
    fn double_cone_rejects_non_hyperbolic() {
        assert!(matches!(build_double_cone(2, 2, 2), Err(Error::InvalidInput(_))));
        assert!(matches!(build_double_cone(2, 3, 6), Err(Error::InvalidInput(_))));
        assert!(matches!(build_double_cone(2, 2, 100), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn double_cone_presentation_string() {
        let (poly, cm) = build_double_cone(2, 3, 7).unwrap();
        let names: Vec<String> = poly.faces().to_vec();
        assert_eq!(
            cm.presentation(&names),
            "< r1, r2, r3, r1', r2', r3' | r1^2 = r2^2 = r3^2 = r1'^2 = r2'^2 = r3'^2 = 1, \
             (r1 r2)^2 = 1, (r1 r3)^7 = 1, (r1 r2')^2 = 1, \
             (r2 r3)^3 = 1, (r2 r3')^3 = 1, (r3 r1')^7 = 1, \
             (r1' r2')^2 = 1, (r1' r3')^7 = 1, (r2' r3')^3 = 1 >"
        );
    }

    #[test]
    fn empty_parabolic_is_trivial() {
        let (_, cm) = build_tetrahedron(7).unwrap();
        let finite = finite_parabolics(&cm).unwrap();
        assert_eq!(finite[0].indices, Vec::<usize>::new());
        assert_eq!(finite[0].order, 1);
    }

    #[test]
    fn tetrahedron_x2_has_spherical_vertex_group() {
        let (_, cm) = build_tetrahedron(2).unwrap();
        let finite = finite_parabolics(&cm).unwrap();
        let spherical: Vec<_> = finite.iter().filter(|p| p.indices.len() == 3).collect();
        assert_eq!(spherical.len(), 1);
        assert_eq!(spherical[0].indices, vec![0, 1, 3]);
        assert_eq!(spherical[0].order, 28); // 2 x 14 by block decomposition
    }

    #[test]
    fn tetrahedron_x7_finite_parabolics() {
        let (_, cm) = build_tetrahedron(7).unwrap();
        let finite = finite_parabolics(&cm).unwrap();
        assert!(finite.iter().all(|p| p.indices.len() <= 2));
        let rank2: Vec<_> = finite.iter().filter(|p| p.indices.len() == 2).collect();
        assert_eq!(rank2.len(), 6);
        for p in rank2 {
            let m = cm.label(p.indices[0], p.indices[1]).unwrap();
            assert_eq!(p.order, 2 * m as u64);
        }
    }

    #[test]
    fn double_cone_finite_parabolics_are_the_edges() {
        let (poly, cm) = build_double_cone(2, 3, 7).unwrap();
        let finite = finite_parabolics(&cm).unwrap();
        // empty + 6 singletons + 9 edges, nothing else
        assert_eq!(finite.len(), 1 + 6 + 9);
        for p in finite.iter().filter(|p| p.indices.len() == 2) {
            assert!(poly.edge_label(p.indices[0], p.indices[1]).is_some());
        }
    }

    /// Eigenvalue classification agrees with the exact angle-sum inequality on
    /// an exhaustive rank-3 sweep.
    #[test]
    fn rank3_finiteness_matches_inequality_sweep() {
        for a in 2u32..=10 {
            for b in 2u32..=10 {
                for c in 2u32..=10 {
                    let mut cm = CoxeterMatrix::unrelated(3);
                    cm.set_label(0, 1, a).unwrap();
                    cm.set_label(1, 2, b).unwrap();
                    cm.set_label(0, 2, c).unwrap();
                    let finite = finite_parabolics(&cm).unwrap();
                    let whole_finite = finite.iter().any(|p| p.indices.len() == 3);
                    let expected = Ratio::new(1i64, a as i64)
                        + Ratio::new(1, b as i64)
                        + Ratio::new(1, c as i64)
                        > Ratio::new(1, 1);
                    assert_eq!(whole_finite, expected, "labels [{a},{b},{c}]");
                }
            }
        }
    }

    /// Every subset of a finite-flagged subset is finite-flagged.
    #[test]
    fn finiteness_is_hereditary() {
        for cm in [
            build_tetrahedron(2).unwrap().1,
            build_tetrahedron(7).unwrap().1,
            build_double_cone(2, 3, 7).unwrap().1,
            build_double_cone(3, 3, 4).unwrap().1,
        ] {
            let finite = finite_parabolics(&cm).unwrap();
            let finite_sets: std::collections::HashSet<Vec<usize>> =
                finite.iter().map(|p| p.indices.clone()).collect();
            for p in &finite {
                for drop in 0..p.indices.len() {
                    let mut sub = p.indices.clone();
                    sub.remove(drop);
                    assert!(finite_sets.contains(&sub), "subset of finite must be finite");
                }
            }
        }
    }

    /// Independent eigenvalue oracle for the cosine-matrix test at rank 3.
    #[test]
    fn cosine_eigenvalues_match_determinant_oracle() {
        let (_, cm) = build_tetrahedron(7).unwrap();
        for subset in [vec![0usize, 1, 2], vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3]] {
            let m = cm.cosine_matrix(&subset);
            // 3x3 symmetric with unit diagonal: positive definite iff both the
            // leading 2x2 minor and the determinant are positive.
            let det3 = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
            let det2 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let pd_oracle = det2 > 0.0 && det3 > 0.0;
            assert_eq!(is_positive_definite(&m), pd_oracle);
        }
    }

    #[test]
    fn unsupported_block_is_reported() {
        // A_4 path: positive definite but outside the supported block table.
        let mut cm = CoxeterMatrix::unrelated(4);
        cm.set_label(0, 1, 3).unwrap();
        cm.set_label(1, 2, 3).unwrap();
        cm.set_label(2, 3, 3).unwrap();
        cm.set_label(0, 2, 2).unwrap();
        cm.set_label(0, 3, 2).unwrap();
        cm.set_label(1, 3, 2).unwrap();
        assert!(matches!(finite_parabolics(&cm), Err(Error::UnsupportedBlock(_))));
    }
}
