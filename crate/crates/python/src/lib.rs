//! Python bindings: the main types and operations of the certification
//! pipeline, plus the job runner and the built-in catalog.
//!
//! Build with `cargo build -p geodete-python`, then import the produced
//! cdylib as `geodete_py` (see `python/smoke_test.py` for a loader).

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyType;

use geodete_core::census::{boundary_census, corollary_constructions, orientability_3d};
use geodete_core::error::Error;
use geodete_core::extend::{self, ExtensionResult};
use geodete_core::job::{parse_job, run_job};
use geodete_core::lorentz::{classify_and_realize, gram_tetrahedron, solve_double_cone_gram, SolveOptions};
use geodete_core::permgroup::{self, GeneratedGroup, ProjectiveKind};
use geodete_core::surface::{self, SurfaceAction, TriangleSignature};
use geodete_core::{catalog, DEFAULT_ENUMERATION_BOUND};

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::EnumerationBound { .. } | Error::Solver { .. } | Error::Internal(_) => {
            PyRuntimeError::new_err(err.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A permutation of `{0, …, degree-1}`.
#[pyclass(name = "Permutation", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPermutation {
    inner: permgroup::Permutation,
}

#[pymethods]
impl PyPermutation {
    #[new]
    fn new(images: Vec<usize>) -> PyResult<Self> {
        Ok(PyPermutation {
            inner: permgroup::Permutation::from_images(&images).map_err(to_py_err)?,
        })
    }

    #[classmethod]
    fn identity(_cls: &Bound<'_, PyType>, degree: usize) -> Self {
        PyPermutation {
            inner: permgroup::Permutation::identity(degree),
        }
    }

    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn images(&self) -> Vec<usize> {
        self.inner.images()
    }

    fn order(&self) -> u64 {
        self.inner.order()
    }

    fn is_involution(&self) -> bool {
        self.inner.is_involution()
    }

    fn inverse(&self) -> Self {
        PyPermutation {
            inner: self.inner.inverse(),
        }
    }

    /// Functional composition: `other` acts first.
    fn compose(&self, other: &PyPermutation) -> PyResult<Self> {
        let (product, _) =
            permgroup::compose_and_order(&self.inner, &other.inner).map_err(to_py_err)?;
        Ok(PyPermutation { inner: product })
    }

    fn __repr__(&self) -> String {
        format!("Permutation({})", self.inner)
    }

    fn __eq__(&self, other: &PyPermutation) -> bool {
        self.inner == other.inner
    }

    fn __hash__(&self) -> u64 {
        use std::collections::hash_map::DefaultHasher;
        use std::hash::{Hash, Hasher};
        let mut hasher = DefaultHasher::new();
        self.inner.hash(&mut hasher);
        hasher.finish()
    }
}

/// A finite permutation group with enumerated elements.
#[pyclass(name = "Group", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGroup {
    inner: Arc<GeneratedGroup>,
}

#[pymethods]
impl PyGroup {
    /// Enumerates the group generated by the given image arrays.
    #[classmethod]
    #[pyo3(signature = (degree, generators, bound = DEFAULT_ENUMERATION_BOUND))]
    fn generate(
        _cls: &Bound<'_, PyType>,
        degree: usize,
        generators: Vec<Vec<usize>>,
        bound: usize,
    ) -> PyResult<Self> {
        let gens = generators
            .iter()
            .map(|g| permgroup::Permutation::from_images(g))
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py_err)?;
        Ok(PyGroup {
            inner: Arc::new(GeneratedGroup::generate(degree, gens, bound).map_err(to_py_err)?),
        })
    }

    /// The projective group over the prime field with `q` elements, acting on
    /// the `q+1` points of the projective line. `kind` is `"psl2"` or
    /// `"pgl2"`.
    #[classmethod]
    fn projective(_cls: &Bound<'_, PyType>, q: u64, kind: &str) -> PyResult<Self> {
        let kind = match kind {
            "psl2" => ProjectiveKind::Psl,
            "pgl2" => ProjectiveKind::Pgl,
            other => {
                return Err(PyValueError::new_err(format!(
                    "kind must be \"psl2\" or \"pgl2\", got {other:?}"
                )))
            }
        };
        Ok(PyGroup {
            inner: Arc::new(permgroup::projective_group_default(q, kind).map_err(to_py_err)?),
        })
    }

    fn order(&self) -> u64 {
        self.inner.order()
    }

    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn contains(&self, p: &PyPermutation) -> bool {
        self.inner.contains(&p.inner)
    }

    fn generators(&self) -> Vec<PyPermutation> {
        self.inner
            .generators()
            .iter()
            .map(|g| PyPermutation { inner: g.clone() })
            .collect()
    }

    fn involutions(&self) -> Vec<PyPermutation> {
        self.inner
            .involutions()
            .into_iter()
            .map(|g| PyPermutation { inner: g })
            .collect()
    }

    /// The direct product with a two-element group on the doubled point set.
    fn direct_product_with_z2(&self) -> PyResult<Self> {
        Ok(PyGroup {
            inner: Arc::new(
                self.inner
                    .direct_product_with_z2(DEFAULT_ENUMERATION_BOUND)
                    .map_err(to_py_err)?,
            ),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Group(order={}, degree={})",
            self.inner.order(),
            self.inner.degree()
        )
    }
}

/// A validated surface action.
#[pyclass(name = "SurfaceAction", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySurfaceAction {
    inner: SurfaceAction,
}

#[pymethods]
impl PySurfaceAction {
    fn signature(&self) -> (u32, u32, u32) {
        self.inner.signature().as_tuple()
    }

    fn group(&self) -> PyGroup {
        PyGroup {
            inner: Arc::clone(self.inner.group()),
        }
    }

    fn images(&self) -> Vec<PyPermutation> {
        self.inner
            .images()
            .iter()
            .map(|p| PyPermutation { inner: p.clone() })
            .collect()
    }

    fn euler_characteristic(&self) -> i64 {
        self.inner.euler_characteristic()
    }

    fn orientable(&self) -> bool {
        self.inner.orientable()
    }

    fn genus(&self) -> u32 {
        self.inner.genus()
    }

    fn hurwitz_class(&self) -> &'static str {
        self.inner.hurwitz_class().as_str()
    }

    fn __repr__(&self) -> String {
        format!(
            "SurfaceAction(signature={:?}, order={}, genus={}, orientable={})",
            self.inner.signature().as_tuple(),
            self.inner.group().order(),
            self.inner.genus(),
            self.inner.orientable()
        )
    }
}

/// A verified extension over a polyhedral Coxeter group.
#[pyclass(name = "Extension", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyExtension {
    inner: ExtensionResult,
}

#[pymethods]
impl PyExtension {
    fn theorem(&self) -> &'static str {
        self.inner.theorem().as_str()
    }

    fn kernel_free(&self) -> bool {
        self.inner.kernel_free()
    }

    /// The variable tetrahedron edge label, when this is a tetrahedral
    /// extension.
    fn x(&self) -> Option<u32> {
        self.inner.candidate().map(|c| c.x)
    }

    fn psi_images(&self) -> Vec<PyPermutation> {
        self.inner
            .psi_images()
            .iter()
            .map(|p| PyPermutation { inner: p.clone() })
            .collect()
    }

    fn presentation(&self) -> String {
        self.inner
            .coxeter()
            .presentation(self.inner.polyhedron().faces())
    }

    /// Freeness transcript rows: (subset face names, abstract order, image
    /// order, injective).
    fn transcript(&self) -> Vec<(Vec<String>, u64, u64, bool)> {
        let faces = self.inner.polyhedron().faces();
        self.inner
            .transcript()
            .iter()
            .map(|e| {
                (
                    e.subset.iter().map(|&i| faces[i].clone()).collect(),
                    e.abstract_order,
                    e.image_order,
                    e.injective,
                )
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Extension(theorem={}, kernel_free={})",
            self.inner.theorem().as_str(),
            self.inner.kernel_free()
        )
    }
}

/// Validates a triple of generator images as a surface action.
#[pyfunction]
#[pyo3(signature = (group, signature, images, bound = DEFAULT_ENUMERATION_BOUND))]
fn validate_action(
    group: &PyGroup,
    signature: (u32, u32, u32),
    images: Vec<Vec<usize>>,
    bound: usize,
) -> PyResult<PySurfaceAction> {
    let signature =
        TriangleSignature::new(signature.0, signature.1, signature.2).map_err(to_py_err)?;
    let images: [Vec<usize>; 3] = images
        .try_into()
        .map_err(|_| PyValueError::new_err("exactly three images required"))?;
    let perms = [
        permgroup::Permutation::from_images(&images[0]).map_err(to_py_err)?,
        permgroup::Permutation::from_images(&images[1]).map_err(to_py_err)?,
        permgroup::Permutation::from_images(&images[2]).map_err(to_py_err)?,
    ];
    Ok(PySurfaceAction {
        inner: surface::validate_action(signature, Arc::clone(&group.inner), perms, bound)
            .map_err(to_py_err)?,
    })
}

/// Exhaustively searches for actions of the signature on the group, up to
/// conjugacy.
#[pyfunction]
#[pyo3(signature = (group, signature, bound = DEFAULT_ENUMERATION_BOUND))]
fn search_epimorphisms(
    group: &PyGroup,
    signature: (u32, u32, u32),
    bound: usize,
) -> PyResult<Vec<PySurfaceAction>> {
    let signature =
        TriangleSignature::new(signature.0, signature.1, signature.2).map_err(to_py_err)?;
    Ok(surface::search_epimorphisms(signature, &group.inner, bound)
        .map_err(to_py_err)?
        .into_iter()
        .map(|inner| PySurfaceAction { inner })
        .collect())
}

/// Lifts a nonorientable action to its orientable double cover. Returns the
/// lifted action and the deck involution.
#[pyfunction]
#[pyo3(signature = (action, bound = DEFAULT_ENUMERATION_BOUND))]
fn lift_double_cover(
    action: &PySurfaceAction,
    bound: usize,
) -> PyResult<(PySurfaceAction, PyPermutation)> {
    let lift = surface::lift_double_cover(&action.inner, bound).map_err(to_py_err)?;
    Ok((
        PySurfaceAction {
            inner: lift.lifted().clone(),
        },
        PyPermutation {
            inner: lift.deck_involution().clone(),
        },
    ))
}

/// Classifies an involution of the acting group: returns
/// (orientation_reversing, fixed_point_free).
#[pyfunction]
#[pyo3(signature = (action, involution, bound = DEFAULT_ENUMERATION_BOUND))]
fn involution_analysis(
    action: &PySurfaceAction,
    involution: &PyPermutation,
    bound: usize,
) -> PyResult<(bool, bool)> {
    let analysis =
        surface::involution_analysis(&action.inner, &involution.inner, bound).map_err(to_py_err)?;
    Ok((analysis.orientation_reversing, analysis.fixed_point_free))
}

/// All tetrahedral extensions of a `(2,3,7)` action, one per admissible
/// fourth reflection.
#[pyfunction]
#[pyo3(signature = (action, bound = DEFAULT_ENUMERATION_BOUND))]
fn extend_theorem1(action: &PySurfaceAction, bound: usize) -> PyResult<Vec<PyExtension>> {
    Ok(extend::extend_thm1_all(&action.inner, bound)
        .map_err(to_py_err)?
        .into_iter()
        .map(|inner| PyExtension { inner })
        .collect())
}

/// The double-cone extension of an arbitrary-signature action.
#[pyfunction]
#[pyo3(signature = (action, bound = DEFAULT_ENUMERATION_BOUND))]
fn extend_theorem2(action: &PySurfaceAction, bound: usize) -> PyResult<PyExtension> {
    Ok(PyExtension {
        inner: extend::extend_thm2(&action.inner, bound).map_err(to_py_err)?,
    })
}

/// Orientability of the quotient 3-manifold of a kernel-free extension.
#[pyfunction]
#[pyo3(signature = (extension, bound = DEFAULT_ENUMERATION_BOUND))]
fn manifold_orientable(extension: &PyExtension, bound: usize) -> PyResult<bool> {
    Ok(orientability_3d(&extension.inner, bound)
        .map_err(to_py_err)?
        .0)
}

/// Boundary census rows of a kernel-free, realized extension:
/// (vertex, labels, total_euler, component_count, per_component_euler).
#[pyfunction]
#[pyo3(signature = (extension, seed = 42, bound = DEFAULT_ENUMERATION_BOUND))]
fn census(extension: &PyExtension, seed: u64, bound: usize) -> PyResult<Vec<(usize, Vec<u32>, i64, u64, i64)>> {
    let ext = &extension.inner;
    let gram = match ext.theorem() {
        extend::Theorem::T1 => {
            gram_tetrahedron(ext.candidate().expect("tetrahedral extension").x).map_err(to_py_err)?
        }
        extend::Theorem::T2 => {
            let (p, q, r) = ext.base_action().signature().as_tuple();
            let options = SolveOptions {
                seed,
                ..SolveOptions::default()
            };
            solve_double_cone_gram(p, q, r, &options).map_err(to_py_err)?.0
        }
    };
    let realization = classify_and_realize(&gram, ext.polyhedron()).map_err(to_py_err)?;
    Ok(boundary_census(ext, &realization, bound)
        .map_err(to_py_err)?
        .into_iter()
        .map(|r| {
            (
                r.vertex,
                r.labels,
                r.total_euler,
                r.component_count,
                r.per_component_euler,
            )
        })
        .collect())
}

/// Split-and-identify records of an orientable action:
/// (involution images, fixed_point_free, result_kind).
#[pyfunction]
#[pyo3(signature = (action, bound = DEFAULT_ENUMERATION_BOUND))]
fn corollary_records(
    action: &PySurfaceAction,
    bound: usize,
) -> PyResult<Vec<(Vec<usize>, bool, String)>> {
    Ok(corollary_constructions(&action.inner, None, bound)
        .map_err(to_py_err)?
        .into_iter()
        .map(|r| {
            (
                r.involution.images(),
                r.fixed_point_free,
                r.result_kind.as_str().to_string(),
            )
        })
        .collect())
}

/// Runs a TOML job and returns (exit_code, certificate_json).
#[pyfunction]
fn run_job_toml(text: &str) -> PyResult<(i32, String)> {
    let spec = parse_job(text).map_err(to_py_err)?;
    let outcome = run_job(&spec).map_err(to_py_err)?;
    Ok((outcome.exit_code, outcome.certificate))
}

/// Names of the built-in catalog jobs.
#[pyfunction]
fn catalog_names() -> Vec<&'static str> {
    catalog::names()
}

/// TOML source of a built-in catalog job.
#[pyfunction]
fn catalog_job(name: &str) -> PyResult<&'static str> {
    catalog::job(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown catalog entry {name:?}")))
}

#[pymodule]
fn geodete_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPermutation>()?;
    m.add_class::<PyGroup>()?;
    m.add_class::<PySurfaceAction>()?;
    m.add_class::<PyExtension>()?;
    m.add_function(wrap_pyfunction!(validate_action, m)?)?;
    m.add_function(wrap_pyfunction!(search_epimorphisms, m)?)?;
    m.add_function(wrap_pyfunction!(lift_double_cover, m)?)?;
    m.add_function(wrap_pyfunction!(involution_analysis, m)?)?;
    m.add_function(wrap_pyfunction!(extend_theorem1, m)?)?;
    m.add_function(wrap_pyfunction!(extend_theorem2, m)?)?;
    m.add_function(wrap_pyfunction!(manifold_orientable, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_records, m)?)?;
    m.add_function(wrap_pyfunction!(run_job_toml, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_job, m)?)?;
    m.add("DEFAULT_ENUMERATION_BOUND", DEFAULT_ENUMERATION_BOUND)?;
    Ok(())
}
