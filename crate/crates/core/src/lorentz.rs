//! Numerical realization of the labeled polyhedra in the Lorentzian model of
//! hyperbolic 3-space.
//!
//! A realization is a set of unit spacelike face normals in Minkowski space
//! `R^{3,1}` whose pairwise products reproduce the Gram matrix of the labels
//! (entry `-cos(π/m)` for an edge labeled `m`). A Gram matrix is realizable
//! iff it has signature `(3,1)` and rank 4. Vertices are classified by the
//! signature of their incident-face principal submatrix: positive definite
//! vertices are genuine points, a `(2,1)` signature means the vertex is
//! hyperideal and gets replaced by an orthogonal truncating plane (the common
//! Lorentz-orthogonal complement of its incident normals).
//!
//! The tetrahedron's Gram matrix is fully determined by its labels. The double
//! cone has six undetermined entries (the non-adjacent face pairs), solved by
//! Levenberg-Marquardt so that the matrix has rank 4 (all 5x5 principal minors
//! vanish) and the four-face vertices close up (their 4x4 principal minors
//! vanish), then polished in normal space to drive the vertex-plane
//! orthogonality down to machine precision.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coxeter::{build_double_cone, CoxeterMatrix, LabeledPolyhedron};
use crate::error::Error;
use crate::Result;

/// Residual gate for the double-cone solve (max |5x5 principal minor|).
pub const SOLVE_TOL: f64 = 1e-10;
/// Tolerance for validating recomputed Gram entries and recovered angles.
pub const VALIDATION_TOL: f64 = 1e-8;
/// Tolerance for truncating-plane orthogonality and unit norms.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Relative tolerance below which an eigenvalue counts as zero.
pub const EIGEN_ZERO_TOL: f64 = 1e-9;
/// Unit-norm reproduction tolerance for extracted normals.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// The cosine entry `-cos(π/m)` of a label, with the right angle exact.
pub fn label_cosine(m: u32) -> f64 {
    if m == 2 {
        0.0
    } else {
        -(std::f64::consts::PI / m as f64).cos()
    }
}

/// The Minkowski product of signature `(+,+,+,-)`.
pub fn minkowski(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2] - u[3] * v[3]
}

/// Where a Gram entry came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryProvenance {
    Diagonal,
    /// Fixed by an edge label `m`.
    Labeled(u32),
    /// Solved as the k-th unknown (a non-adjacent face pair).
    Solved(usize),
}

/// A symmetric Gram matrix of unit spacelike normals, with per-entry
/// provenance.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    matrix: DMatrix<f64>,
    provenance: Vec<Vec<EntryProvenance>>,
}

impl GramMatrix {
    fn new(matrix: DMatrix<f64>, provenance: Vec<Vec<EntryProvenance>>) -> Self {
        GramMatrix { matrix, provenance }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn provenance(&self, i: usize, j: usize) -> EntryProvenance {
        self.provenance[i][j]
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eigen: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        eigen.sort_by(|a, b| b.partial_cmp(a).unwrap());
        eigen
    }

    /// Checks the signature is `(3,1)` with all remaining eigenvalues zero
    /// within the relative tolerance.
    pub fn has_lorentzian_signature(&self) -> bool {
        self.signature_counts().map(|(pos, neg)| pos == 3 && neg == 1).unwrap_or(false)
    }

    fn signature_counts(&self) -> Option<(usize, usize)> {
        let eigen = self.eigenvalues();
        let scale = eigen.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        if scale == 0.0 {
            return None;
        }
        let pos = eigen.iter().filter(|&&l| l > EIGEN_ZERO_TOL * scale).count();
        let neg = eigen.iter().filter(|&&l| l < -EIGEN_ZERO_TOL * scale).count();
        Some((pos, neg))
    }

    /// Maximum absolute value over all `(n-1)x(n-1)` principal minors; zero
    /// within tolerance certifies rank ≤ 4 for a 6x6 matrix.
    pub fn max_principal_minor(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|drop| {
                let keep: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
                submatrix(&self.matrix, &keep).determinant().abs()
            })
            .fold(0.0, f64::max)
    }
}

fn submatrix(m: &DMatrix<f64>, keep: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(keep.len(), keep.len(), |a, b| m[(keep[a], keep[b])])
}

/// Builds the fully-labeled Gram matrix of the tetrahedron with variable
/// label `x`: off-diagonal entries `-cos(π/m)` for the six labels
/// `{2,3,7,7,x,7}`.
pub fn gram_tetrahedron(x: u32) -> Result<GramMatrix> {
    let (polyhedron, _) = crate::coxeter::build_tetrahedron(x)?;
    let mut matrix = DMatrix::identity(4, 4);
    let mut provenance = vec![vec![EntryProvenance::Diagonal; 4]; 4];
    for e in polyhedron.edges() {
        let (i, j) = e.faces;
        matrix[(i, j)] = label_cosine(e.label);
        matrix[(j, i)] = label_cosine(e.label);
        provenance[i][j] = EntryProvenance::Labeled(e.label);
        provenance[j][i] = EntryProvenance::Labeled(e.label);
    }
    Ok(GramMatrix::new(matrix, provenance))
}

/// Classification of a polyhedron vertex in a realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexClass {
    /// Incident-face submatrix positive definite: a genuine point.
    Spherical,
    /// Submatrix singular positive semidefinite: a point at infinity.
    Ideal,
    /// Submatrix of signature `(2,1)`: truncated by an orthogonal plane.
    Hyperideal,
}

impl VertexClass {
    pub fn as_str(self) -> &'static str {
        match self {
            VertexClass::Spherical => "spherical",
            VertexClass::Ideal => "ideal",
            VertexClass::Hyperideal => "hyperideal",
        }
    }
}

/// Face normals, vertex classes and truncating planes realizing a labeled
/// polyhedron.
#[derive(Clone, Debug)]
pub struct PolyhedronRealization {
    face_normals: Vec<DVector<f64>>,
    vertex_classes: Vec<VertexClass>,
    truncating_planes: Vec<Option<DVector<f64>>>,
    residual: f64,
}

impl PolyhedronRealization {
    pub fn face_normals(&self) -> &[DVector<f64>] {
        &self.face_normals
    }

    pub fn vertex_classes(&self) -> &[VertexClass] {
        &self.vertex_classes
    }

    pub fn truncating_planes(&self) -> &[Option<DVector<f64>>] {
        &self.truncating_planes
    }

    /// Maximum violation over reproduced Gram entries and plane constraints.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Extracts unit spacelike face normals from a Gram matrix of signature
/// `(3,1)`: the significant eigenpairs, columns ordered `(+,+,+,-)`, scaled by
/// the square roots of the eigenvalue magnitudes.
fn extract_normals(gram: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let n = gram.nrows();
    let eigen = gram.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].partial_cmp(&eigen.eigenvalues[a]).unwrap());
    let scale = (0..n).map(|i| eigen.eigenvalues[i].abs()).fold(0.0, f64::max);
    let positives: Vec<usize> = order
        .iter()
        .cloned()
        .filter(|&i| eigen.eigenvalues[i] > EIGEN_ZERO_TOL * scale)
        .collect();
    let negatives: Vec<usize> = order
        .iter()
        .cloned()
        .filter(|&i| eigen.eigenvalues[i] < -EIGEN_ZERO_TOL * scale)
        .collect();
    if positives.len() != 3 || negatives.len() != 1 {
        return Err(Error::Realization(format!(
            "Gram matrix has signature ({}, {}), expected (3, 1)",
            positives.len(),
            negatives.len()
        )));
    }
    let columns = [positives[0], positives[1], positives[2], negatives[0]];
    let mut normals = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = DVector::zeros(4);
        for (k, &c) in columns.iter().enumerate() {
            v[k] = eigen.eigenvectors[(i, c)] * eigen.eigenvalues[c].abs().sqrt();
        }
        // Dropping the near-zero eigenpairs perturbs norms by their
        // magnitude; rescale to exactly unit spacelike.
        let norm = minkowski(&v, &v);
        if norm <= 0.0 {
            return Err(Error::Realization(format!(
                "extracted normal {i} is not spacelike (norm {norm:.3e})"
            )));
        }
        normals.push(v / norm.sqrt());
    }
    Ok(normals)
}

/// Null vector of a `k x 4` matrix (`k ≤ 4`) via the SVD of its zero-padded
/// square, i.e. the right singular vector of least singular value.
fn null_vector(rows: &[DVector<f64>]) -> DVector<f64> {
    let mut a = DMatrix::zeros(4, 4);
    for (r, row) in rows.iter().enumerate() {
        for c in 0..4 {
            a[(r, c)] = row[c];
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut least = 0;
    for i in 1..svd.singular_values.len() {
        if svd.singular_values[i] < svd.singular_values[least] {
            least = i;
        }
    }
    v_t.row(least).transpose()
}

/// Classifies every vertex of a realized polyhedron and solves the truncating
/// plane of each hyperideal vertex.
///
/// Errors if the Gram signature is not `(3,1)`, if a vertex is ideal (the
/// pipeline's polyhedra have none; out-of-model input fails loudly), if a
/// vertex submatrix has more than one negative eigenvalue, or if a polar
/// vector fails to be spacelike.
pub fn classify_and_realize(
    gram: &GramMatrix,
    polyhedron: &LabeledPolyhedron,
) -> Result<PolyhedronRealization> {
    let normals = extract_normals(gram.matrix())?;
    let mut vertex_classes = Vec::new();
    let mut truncating_planes = Vec::new();
    for (v, faces) in polyhedron.vertices().iter().enumerate() {
        let sub = submatrix(gram.matrix(), faces);
        let eigen = sub.symmetric_eigen();
        let scale = eigen.eigenvalues.iter().fold(1.0f64, |m, &l| m.max(l.abs()));
        let neg = eigen.eigenvalues.iter().filter(|&&l| l < -EIGEN_ZERO_TOL * scale).count();
        let zero = eigen.eigenvalues.iter().filter(|&&l| l.abs() <= EIGEN_ZERO_TOL * scale).count();
        let class = match (neg, zero) {
            (0, 0) => VertexClass::Spherical,
            (0, _) => VertexClass::Ideal,
            (1, _) => VertexClass::Hyperideal,
            _ => {
                return Err(Error::Realization(format!(
                    "vertex {v} submatrix has {neg} negative eigenvalues"
                )))
            }
        };
        if class == VertexClass::Ideal {
            return Err(Error::Realization(format!(
                "vertex {v} is ideal; the pipeline's polyhedra are compact after truncation"
            )));
        }
        let plane = if class == VertexClass::Hyperideal {
            // Rows <e_i, ·> of the orthogonality system, as Euclidean rows of
            // N_F J; the truncating plane is their common null vector.
            let rows: Vec<DVector<f64>> = faces
                .iter()
                .map(|&i| {
                    let mut row = normals[i].clone();
                    row[3] = -row[3];
                    row
                })
                .collect();
            let raw = null_vector(&rows);
            let norm = minkowski(&raw, &raw);
            if norm <= 1e-8 {
                return Err(Error::Realization(format!(
                    "polar vector of vertex {v} is not spacelike (norm {norm:.3e}); mislabeled input"
                )));
            }
            let mut plane = raw / norm.sqrt();
            // Canonical sign: first significant coordinate positive.
            if let Some(k) = (0..4).find(|&k| plane[k].abs() > 1e-8) {
                if plane[k] < 0.0 {
                    plane = -plane;
                }
            }
            Some(plane)
        } else {
            None
        };
        vertex_classes.push(class);
        truncating_planes.push(plane);
    }

    // Residual: worst Gram reproduction defect and plane-constraint defect.
    let mut residual = 0.0f64;
    for i in 0..gram.n() {
        for j in 0..gram.n() {
            residual = residual.max((minkowski(&normals[i], &normals[j]) - gram.value(i, j)).abs());
        }
    }
    for (v, plane) in truncating_planes.iter().enumerate() {
        if let Some(plane) = plane {
            for &i in &polyhedron.vertices()[v] {
                residual = residual.max(minkowski(plane, &normals[i]).abs());
            }
            residual = residual.max((minkowski(plane, plane) - 1.0).abs());
        }
    }

    Ok(PolyhedronRealization {
        face_normals: normals,
        vertex_classes,
        truncating_planes,
        residual,
    })
}

/// Recovered cross-section corner of a truncated vertex: an incident edge with
/// its label angle and the angle recomputed from the normals.
#[derive(Clone, Debug)]
pub struct CrossSectionCorner {
    pub faces: (usize, usize),
    pub label: u32,
    pub recovered_angle: f64,
}

/// Per-vertex cross-section report of a validated realization.
#[derive(Clone, Debug)]
pub struct CrossSection {
    pub vertex: usize,
    pub class: VertexClass,
    pub corners: Vec<CrossSectionCorner>,
}

/// Outcome of validating a realization against its Gram matrix and labels.
#[derive(Clone, Debug)]
pub struct RealizationReport {
    pub max_gram_defect: f64,
    pub max_unit_defect: f64,
    pub max_orthogonality_defect: f64,
    pub max_angle_defect: f64,
    pub cross_sections: Vec<CrossSection>,
}

/// Recomputes all pairwise products, truncating-plane constraints and
/// dihedral angles from the normals, and checks them against the Gram matrix
/// and the edge labels at the pinned tolerances.
pub fn validate_realization(
    realization: &PolyhedronRealization,
    gram: &GramMatrix,
    polyhedron: &LabeledPolyhedron,
) -> Result<RealizationReport> {
    let normals = realization.face_normals();
    let n = gram.n();
    let mut max_gram_defect = 0.0f64;
    let mut max_unit_defect = 0.0f64;
    for i in 0..n {
        let unit = (minkowski(&normals[i], &normals[i]) - 1.0).abs();
        max_unit_defect = max_unit_defect.max(unit);
        if unit > UNIT_NORM_TOL {
            return Err(Error::Realization(format!(
                "normal {i} has unit defect {unit:.3e} > {UNIT_NORM_TOL:.0e}"
            )));
        }
        for j in 0..n {
            let defect = (minkowski(&normals[i], &normals[j]) - gram.value(i, j)).abs();
            max_gram_defect = max_gram_defect.max(defect);
            if defect > VALIDATION_TOL {
                return Err(Error::Realization(format!(
                    "Gram entry ({i}, {j}) reproduced with defect {defect:.3e} > {VALIDATION_TOL:.0e}"
                )));
            }
        }
    }

    let mut max_orthogonality_defect = 0.0f64;
    for (v, faces) in polyhedron.vertices().iter().enumerate() {
        match (realization.vertex_classes()[v], &realization.truncating_planes()[v]) {
            (VertexClass::Hyperideal, Some(plane)) => {
                for &i in faces {
                    let defect = minkowski(plane, &normals[i]).abs();
                    max_orthogonality_defect = max_orthogonality_defect.max(defect);
                    if defect > ORTHOGONALITY_TOL {
                        return Err(Error::Realization(format!(
                            "truncating plane of vertex {v} not orthogonal to face {i}: {defect:.3e}"
                        )));
                    }
                }
                let unit = (minkowski(plane, plane) - 1.0).abs();
                max_orthogonality_defect = max_orthogonality_defect.max(unit);
                if unit > ORTHOGONALITY_TOL {
                    return Err(Error::Realization(format!(
                        "truncating plane of vertex {v} has unit defect {unit:.3e}"
                    )));
                }
            }
            (VertexClass::Hyperideal, None) => {
                return Err(Error::Realization(format!(
                    "hyperideal vertex {v} is missing its truncating plane"
                )))
            }
            (_, Some(_)) => {
                return Err(Error::Realization(format!(
                    "non-hyperideal vertex {v} carries a truncating plane"
                )))
            }
            _ => {}
        }
    }

    // Cross-section angles: at a truncated vertex the truncation polygon's
    // corner on an incident edge equals the edge's dihedral angle.
    let mut max_angle_defect = 0.0f64;
    let mut cross_sections = Vec::new();
    for (v, faces) in polyhedron.vertices().iter().enumerate() {
        let mut corners = Vec::new();
        for e in polyhedron.edges() {
            let (i, j) = e.faces;
            if !faces.contains(&i) || !faces.contains(&j) {
                continue;
            }
            let product = minkowski(&normals[i], &normals[j]);
            let recovered = (-product).clamp(-1.0, 1.0).acos();
            let expected = std::f64::consts::PI / e.label as f64;
            let defect = (recovered - expected).abs();
            max_angle_defect = max_angle_defect.max(defect);
            if defect > VALIDATION_TOL {
                return Err(Error::Realization(format!(
                    "edge ({i}, {j}) angle recovered as {recovered:.12} for label {}",
                    e.label
                )));
            }
            corners.push(CrossSectionCorner {
                faces: (i, j),
                label: e.label,
                recovered_angle: recovered,
            });
        }
        cross_sections.push(CrossSection {
            vertex: v,
            class: realization.vertex_classes()[v],
            corners,
        });
    }

    Ok(RealizationReport {
        max_gram_defect,
        max_unit_defect,
        max_orthogonality_defect,
        max_angle_defect,
        cross_sections,
    })
}

/// Options for the double-cone Gram solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub seed: u64,
    pub tol: f64,
    pub max_restarts: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 42,
            tol: SOLVE_TOL,
            max_restarts: 32,
        }
    }
}

/// Diagnostics of an accepted double-cone solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveReport {
    /// Max |5x5 principal minor| of the accepted matrix.
    pub minor_residual: f64,
    /// Max |4x4 vertex minor| over the four-face vertices.
    pub vertex_residual: f64,
    /// Restarts consumed before acceptance (0 = default start worked).
    pub restarts: usize,
}

/// Dense little Levenberg-Marquardt with central-difference Jacobians; the
/// systems here are 9x6 and 18x24 with zero residual at the solution.
fn levenberg_marquardt<F>(x0: DVector<f64>, f: F, max_iterations: usize) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut x = x0;
    let mut lambda = 1e-3;
    let mut cost = {
        let r = f(&x);
        r.dot(&r)
    };
    for _ in 0..max_iterations {
        let residual = f(&x);
        if residual.amax() < 1e-14 {
            break;
        }
        let jacobian = numeric_jacobian(&f, &x, 1e-7);
        let jt = jacobian.transpose();
        let gradient = &jt * &residual;
        let mut hessian = &jt * &jacobian;
        for d in 0..hessian.nrows() {
            hessian[(d, d)] += lambda;
        }
        let Some(step) = hessian.lu().solve(&(-&gradient)) else {
            lambda *= 10.0;
            continue;
        };
        let candidate = &x + &step;
        let candidate_residual = f(&candidate);
        let candidate_cost = candidate_residual.dot(&candidate_residual);
        if candidate_cost <= cost {
            x = candidate;
            cost = candidate_cost;
            lambda = (lambda / 3.0).max(1e-14);
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    x
}

fn numeric_jacobian<F>(f: &F, x: &DVector<f64>, h: f64) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let m = f(x).len();
    let n = x.len();
    let mut jacobian = DMatrix::zeros(m, n);
    for k in 0..n {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[k] += h;
        minus[k] -= h;
        let fp = f(&plus);
        let fm = f(&minus);
        for r in 0..m {
            jacobian[(r, k)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    jacobian
}

struct DoubleConeProblem {
    labeled: Vec<(usize, usize, u32)>,
    unknown_pairs: Vec<(usize, usize)>,
    four_face_vertices: Vec<Vec<usize>>,
}

impl DoubleConeProblem {
    fn new(polyhedron: &LabeledPolyhedron, cm: &CoxeterMatrix) -> Self {
        let labeled = polyhedron
            .edges()
            .iter()
            .map(|e| (e.faces.0, e.faces.1, e.label))
            .collect();
        let unknown_pairs = cm.unrelated_pairs();
        let four_face_vertices = polyhedron
            .vertices()
            .iter()
            .filter(|v| v.len() == 4)
            .cloned()
            .collect();
        DoubleConeProblem {
            labeled,
            unknown_pairs,
            four_face_vertices,
        }
    }

    fn assemble(&self, unknowns: &DVector<f64>) -> DMatrix<f64> {
        let mut g = DMatrix::identity(6, 6);
        for &(i, j, m) in &self.labeled {
            g[(i, j)] = label_cosine(m);
            g[(j, i)] = label_cosine(m);
        }
        for (k, &(i, j)) in self.unknown_pairs.iter().enumerate() {
            g[(i, j)] = unknowns[k];
            g[(j, i)] = unknowns[k];
        }
        g
    }

    /// Rank-4 residuals (the six 5x5 principal minors) followed by the vertex
    /// closing conditions (4x4 principal minors of the four-face vertices).
    fn gram_residuals(&self, unknowns: &DVector<f64>) -> DVector<f64> {
        let g = self.assemble(unknowns);
        let mut out = Vec::with_capacity(6 + self.four_face_vertices.len());
        for drop in 0..6 {
            let keep: Vec<usize> = (0..6).filter(|&i| i != drop).collect();
            out.push(submatrix(&g, &keep).determinant());
        }
        for vertex in &self.four_face_vertices {
            out.push(submatrix(&g, vertex).determinant());
        }
        DVector::from_vec(out)
    }

    /// Normal-space residuals: unit norms, labeled products, and the linear
    /// dependency of each four-face vertex's normals.
    fn normal_residuals(&self, flat: &DVector<f64>) -> DVector<f64> {
        let normals: Vec<DVector<f64>> = (0..6)
            .map(|i| DVector::from_fn(4, |k, _| flat[4 * i + k]))
            .collect();
        let mut out = Vec::new();
        for normal in &normals {
            out.push(minkowski(normal, normal) - 1.0);
        }
        for &(i, j, m) in &self.labeled {
            out.push(minkowski(&normals[i], &normals[j]) - label_cosine(m));
        }
        for vertex in &self.four_face_vertices {
            let mut m = DMatrix::zeros(4, 4);
            for (r, &i) in vertex.iter().enumerate() {
                for c in 0..4 {
                    m[(r, c)] = normals[i][c];
                }
            }
            out.push(m.determinant());
        }
        DVector::from_vec(out)
    }
}

/// Solves the six undetermined Gram entries of the double cone so that the
/// matrix has rank 4 with signature `(3,1)` and every four-face vertex closes
/// up, then polishes the face normals and rebuilds the Gram matrix from them.
///
/// Accepted when the max 5x5 principal minor is below `options.tol`, the
/// signature is `(3,1)`, and every solved entry is at most -1 (non-adjacent
/// faces are ultraparallel). Deterministic for a fixed seed: the first
/// attempt starts from `-cosh(1)`, restarts perturb the start multiplicatively
/// with seeded noise.
pub fn solve_double_cone_gram(
    p: u32,
    q: u32,
    r: u32,
    options: &SolveOptions,
) -> Result<(GramMatrix, SolveReport)> {
    let (polyhedron, cm) = build_double_cone(p, q, r)?;
    let problem = DoubleConeProblem::new(&polyhedron, &cm);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut best_residual = f64::INFINITY;
    let mut last_rejection = String::new();

    for attempt in 0..=options.max_restarts {
        let start = DVector::from_fn(6, |_, _| {
            let t = if attempt == 0 {
                1.0
            } else {
                // Multiplicative perturbation of the default start.
                (1.2 * (rng.gen::<f64>() * 2.0 - 1.0)).exp()
            };
            -t.cosh()
        });
        let solved = levenberg_marquardt(start, |c| problem.gram_residuals(c), 250);
        let coarse_residual = problem.gram_residuals(&solved).amax();
        best_residual = best_residual.min(coarse_residual);
        if coarse_residual > 1e-6 {
            last_rejection = format!("coarse solve stalled at residual {coarse_residual:.3e}");
            continue;
        }
        let gram_coarse = problem.assemble(&solved);
        let Ok(normals) = extract_normals(&gram_coarse) else {
            last_rejection = "coarse solution has wrong signature".into();
            continue;
        };
        let flat0 = DVector::from_fn(24, |k, _| normals[k / 4][k % 4]);
        let polished = levenberg_marquardt(flat0, |x| problem.normal_residuals(x), 80);
        let polished_normals: Vec<DVector<f64>> = (0..6)
            .map(|i| DVector::from_fn(4, |k, _| polished[4 * i + k]))
            .collect();

        // Rebuild the Gram matrix from the polished normals, then pin the
        // labeled entries and diagonal to their exact machine values.
        let mut matrix = DMatrix::from_fn(6, 6, |i, j| {
            minkowski(&polished_normals[i], &polished_normals[j])
        });
        let mut provenance = vec![vec![EntryProvenance::Diagonal; 6]; 6];
        let mut label_defect = 0.0f64;
        for i in 0..6 {
            label_defect = label_defect.max((matrix[(i, i)] - 1.0).abs());
            matrix[(i, i)] = 1.0;
        }
        for &(i, j, m) in &problem.labeled {
            label_defect = label_defect.max((matrix[(i, j)] - label_cosine(m)).abs());
            matrix[(i, j)] = label_cosine(m);
            matrix[(j, i)] = label_cosine(m);
            provenance[i][j] = EntryProvenance::Labeled(m);
            provenance[j][i] = EntryProvenance::Labeled(m);
        }
        for (k, &(i, j)) in problem.unknown_pairs.iter().enumerate() {
            let value = (matrix[(i, j)] + matrix[(j, i)]) / 2.0;
            matrix[(i, j)] = value;
            matrix[(j, i)] = value;
            provenance[i][j] = EntryProvenance::Solved(k);
            provenance[j][i] = EntryProvenance::Solved(k);
        }
        if label_defect > 1e-10 {
            last_rejection = format!("polish left label defect {label_defect:.3e}");
            continue;
        }
        let gram = GramMatrix::new(matrix, provenance);

        let minor_residual = gram.max_principal_minor();
        best_residual = best_residual.min(minor_residual);
        if minor_residual >= options.tol {
            last_rejection = format!("minor residual {minor_residual:.3e} above tolerance");
            continue;
        }
        if !gram.has_lorentzian_signature() {
            last_rejection = "polished solution has wrong signature".into();
            continue;
        }
        let bad_entry = problem
            .unknown_pairs
            .iter()
            .map(|&(i, j)| gram.value(i, j))
            .find(|&v| v > -1.0 + 1e-9);
        if let Some(value) = bad_entry {
            // Ultraparallel planes require products strictly at most -1; a
            // solution violating this is a spurious branch.
            last_rejection = format!(
                "solved entry {value:.12} > -1; geometrically inconsistent branch"
            );
            continue;
        }
        let vertex_residual = problem
            .four_face_vertices
            .iter()
            .map(|v| submatrix(gram.matrix(), v).determinant().abs())
            .fold(0.0, f64::max);
        return Ok((
            gram,
            SolveReport {
                minor_residual,
                vertex_residual,
                restarts: attempt,
            },
        ));
    }
    Err(Error::Solver {
        message: if last_rejection.is_empty() {
            "no acceptable solution".into()
        } else {
            last_rejection
        },
        best_residual,
        restarts: options.max_restarts,
    })
}
