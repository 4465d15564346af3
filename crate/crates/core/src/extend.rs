//! Extension of a surface action over the Coxeter group of a labeled
//! polyhedron, with verified torsion-freeness of the kernel.
//!
//! For a `(2,3,7)` action the fourth generator image is chosen among the
//! reflections of the order-14 dihedral subgroup generated by the first and
//! third images; the order of its product with the second image becomes the
//! variable edge label of the tetrahedron. For an arbitrary hyperbolic
//! signature the double cone is used and the primed generators map to the same
//! images as the unprimed ones, so every relation reduces to one already
//! validated.
//!
//! Freeness of the kernel reduces to injectivity on every finite parabolic
//! subset, because torsion in a Coxeter group is conjugate into finite
//! parabolics; the full injectivity transcript is retained.

use crate::coxeter::{build_double_cone, build_tetrahedron, finite_parabolics, CoxeterMatrix, LabeledPolyhedron};
use crate::error::Error;
use crate::permgroup::{closure, Permutation};
use crate::surface::SurfaceAction;
use crate::Result;

/// Which extension construction produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    T1,
    T2,
}

impl Theorem {
    pub fn as_str(self) -> &'static str {
        match self {
            Theorem::T1 => "T1",
            Theorem::T2 => "T2",
        }
    }
}

/// A proposed image for the fourth tetrahedron reflection.
#[derive(Clone, Debug)]
pub struct ExtensionCandidate {
    /// The chosen reflection in the dihedral subgroup generated by the first
    /// and third generator images.
    pub reflection: Permutation,
    /// Order of (second image) ∘ (reflection); the variable edge label `x` of
    /// the tetrahedron.
    pub x: u32,
    /// Reflections excluded for coinciding with a generator image.
    pub excluded: Vec<Permutation>,
}

/// One row of the freeness transcript: a finite parabolic subset, its
/// abstract order, the order of its image, and whether they agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub subset: Vec<usize>,
    pub abstract_order: u64,
    pub image_order: u64,
    pub injective: bool,
}

/// A verified extension of a surface action over a polyhedral Coxeter group.
#[derive(Clone, Debug)]
pub struct ExtensionResult {
    theorem: Theorem,
    polyhedron: LabeledPolyhedron,
    coxeter: CoxeterMatrix,
    psi_images: Vec<Permutation>,
    base_action: SurfaceAction,
    candidate: Option<ExtensionCandidate>,
    kernel_free: bool,
    transcript: Vec<TranscriptEntry>,
}

impl ExtensionResult {
    pub fn theorem(&self) -> Theorem {
        self.theorem
    }

    pub fn polyhedron(&self) -> &LabeledPolyhedron {
        &self.polyhedron
    }

    pub fn coxeter(&self) -> &CoxeterMatrix {
        &self.coxeter
    }

    /// Generator images, one per polyhedron face.
    pub fn psi_images(&self) -> &[Permutation] {
        &self.psi_images
    }

    pub fn base_action(&self) -> &SurfaceAction {
        &self.base_action
    }

    pub fn candidate(&self) -> Option<&ExtensionCandidate> {
        self.candidate.as_ref()
    }

    pub fn kernel_free(&self) -> bool {
        self.kernel_free
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// The distinct generator images (the fourth image may repeat a base one
    /// only in hand-built results; in produced ones it never does).
    pub fn distinct_images(&self) -> Vec<Permutation> {
        let mut distinct: Vec<Permutation> = Vec::new();
        for image in &self.psi_images {
            if !distinct.contains(image) {
                distinct.push(image.clone());
            }
        }
        distinct
    }
}

/// Enumerates the admissible fourth-reflection candidates for a `(2,3,7)`
/// action.
///
/// The dihedral subgroup generated by the first and third images has order 14;
/// its seven reflections are `(a1 a3)^k ∘ a1`. Removing those equal to a
/// generator image always leaves at least four candidates (the second image
/// may not lie in the dihedral subgroup at all). Every survivor has
/// `ord(a1 b) = ord(a3 b) = 7`, which is asserted.
pub fn thm1_candidates(action: &SurfaceAction) -> Result<Vec<ExtensionCandidate>> {
    if !action.signature().is_237() {
        return Err(Error::InvalidInput(format!(
            "tetrahedral extension requires signature [2,3,7], got {}",
            action.signature()
        )));
    }
    let [a1, a2, a3] = action.images();
    let rotation = a1.compose(a3);
    debug_assert_eq!(rotation.order(), 7);
    let mut candidates = Vec::new();
    let mut excluded = Vec::new();
    let mut reflection = a1.clone();
    for _ in 0..7 {
        if reflection == *a1 || reflection == *a2 || reflection == *a3 {
            excluded.push(reflection.clone());
        } else {
            candidates.push(reflection.clone());
        }
        reflection = rotation.compose(&reflection);
    }
    let out: Vec<ExtensionCandidate> = candidates
        .into_iter()
        .map(|b| {
            let x = a2.compose(&b).order();
            if a1.compose(&b).order() != 7 || a3.compose(&b).order() != 7 {
                return Err(Error::Internal(
                    "candidate reflection does not have order-7 products with a1 and a3".into(),
                ));
            }
            if x < 2 {
                return Err(Error::Internal("candidate coincides with a2".into()));
            }
            Ok(ExtensionCandidate {
                reflection: b,
                x: x as u32,
                excluded: excluded.clone(),
            })
        })
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::Internal("no extension candidates survived exclusion".into()));
    }
    Ok(out)
}

/// Checks that every Coxeter relation maps to the identity under the given
/// images.
fn check_relations(cm: &CoxeterMatrix, images: &[Permutation]) -> Result<()> {
    for (i, image) in images.iter().enumerate() {
        if !image.pow(2).is_identity() {
            return Err(Error::Internal(format!("image of generator {i} is not an involution")));
        }
    }
    for i in 0..cm.rank() {
        for j in (i + 1)..cm.rank() {
            if let Some(m) = cm.label(i, j) {
                if !images[i].compose(&images[j]).pow(m as u64).is_identity() {
                    return Err(Error::Internal(format!(
                        "relation of label {m} on generators ({i}, {j}) does not map to the identity"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Verifies injectivity on every finite parabolic subset and returns the full
/// transcript.
///
/// `K ∩ F = 1` for a finite parabolic `F` iff the images of its generators
/// close to a subgroup of exactly the abstract order.
pub fn verify_free_kernel(
    cm: &CoxeterMatrix,
    images: &[Permutation],
    bound: usize,
) -> Result<(bool, Vec<TranscriptEntry>)> {
    if images.len() != cm.rank() {
        return Err(Error::InvalidInput(format!(
            "{} images for rank-{} Coxeter matrix",
            images.len(),
            cm.rank()
        )));
    }
    let degree = images.first().map(|p| p.degree()).unwrap_or(0);
    let mut transcript = Vec::new();
    let mut kernel_free = true;
    for parabolic in finite_parabolics(cm)? {
        let subset_images: Vec<Permutation> = parabolic
            .indices
            .iter()
            .map(|&i| images[i].clone())
            .collect();
        let image_order = closure(degree, &subset_images, bound)?.len() as u64;
        let injective = image_order == parabolic.order;
        kernel_free &= injective;
        transcript.push(TranscriptEntry {
            subset: parabolic.indices,
            abstract_order: parabolic.order,
            image_order,
            injective,
        });
    }
    Ok((kernel_free, transcript))
}

/// Extends a `(2,3,7)` action over the tetrahedral Coxeter group for one
/// candidate fourth reflection.
pub fn extend_thm1(
    action: &SurfaceAction,
    candidate: &ExtensionCandidate,
    bound: usize,
) -> Result<ExtensionResult> {
    let (polyhedron, coxeter) = build_tetrahedron(candidate.x)?;
    let [a1, a2, a3] = action.images().clone();
    let psi_images = vec![a1, a2, a3, candidate.reflection.clone()];
    check_relations(&coxeter, &psi_images)?;
    let (kernel_free, transcript) = verify_free_kernel(&coxeter, &psi_images, bound)?;
    Ok(ExtensionResult {
        theorem: Theorem::T1,
        polyhedron,
        coxeter,
        psi_images,
        base_action: action.clone(),
        candidate: Some(candidate.clone()),
        kernel_free,
        transcript,
    })
}

/// Extends every candidate of [`thm1_candidates`], in candidate order.
pub fn extend_thm1_all(action: &SurfaceAction, bound: usize) -> Result<Vec<ExtensionResult>> {
    thm1_candidates(action)?
        .iter()
        .map(|candidate| extend_thm1(action, candidate, bound))
        .collect()
}

/// Default selection among extensions: the kernel-free one with the smallest
/// `x`, tie-broken by lexicographic order of the chosen reflection. Returns
/// the index into the input slice.
pub fn select_extension(results: &[ExtensionResult]) -> Option<usize> {
    results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.kernel_free)
        .min_by_key(|(_, r)| {
            let candidate = r.candidate.as_ref().expect("tetrahedral extensions carry a candidate");
            (candidate.x, candidate.reflection.clone())
        })
        .map(|(i, _)| i)
}

/// Extends an arbitrary-signature action over the double-cone Coxeter group.
///
/// Primed generators receive the same images as the unprimed ones, so all nine
/// dihedral relations reduce to the three orders validated on the base action.
pub fn extend_thm2(action: &SurfaceAction, bound: usize) -> Result<ExtensionResult> {
    let (p, q, r) = action.signature().as_tuple();
    let (polyhedron, coxeter) = build_double_cone(p, q, r)?;
    let [a1, a2, a3] = action.images().clone();
    let psi_images = vec![a1.clone(), a2.clone(), a3.clone(), a1, a2, a3];
    check_relations(&coxeter, &psi_images)?;
    let (kernel_free, transcript) = verify_free_kernel(&coxeter, &psi_images, bound)?;
    Ok(ExtensionResult {
        theorem: Theorem::T2,
        polyhedron,
        coxeter,
        psi_images,
        base_action: action.clone(),
        candidate: None,
        kernel_free,
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::{projective_group_default, GeneratedGroup, ProjectiveKind};
    use crate::surface::{search_epimorphisms, TriangleSignature};
    use crate::DEFAULT_ENUMERATION_BOUND as BOUND;
    use std::sync::Arc;

    fn klein_action() -> SurfaceAction {
        let group = Arc::new(projective_group_default(7, ProjectiveKind::Pgl).unwrap());
        search_epimorphisms(TriangleSignature::new(2, 3, 7).unwrap(), &group, BOUND)
            .unwrap()
            .into_iter()
            .next()
            .unwrap()
    }

    /// Brute-force powering oracle for orders.
    fn order_by_iteration(g: &Permutation) -> u64 {
        let mut current = g.clone();
        let mut n = 1;
        while !current.is_identity() {
            current = current.compose(g);
            n += 1;
        }
        n
    }

    #[test]
    fn klein_candidates() {
        let action = klein_action();
        let candidates = thm1_candidates(&action).unwrap();
        assert!((4..=6).contains(&candidates.len()));
        let [a1, a2, a3] = action.images();
        let mut xs: Vec<u32> = Vec::new();
        for c in &candidates {
            assert_eq!(order_by_iteration(&a1.compose(&c.reflection)), 7);
            assert_eq!(order_by_iteration(&a3.compose(&c.reflection)), 7);
            assert_eq!(order_by_iteration(&a2.compose(&c.reflection)), c.x as u64);
            assert_ne!(&c.reflection, a1);
            assert_ne!(&c.reflection, a2);
            assert_ne!(&c.reflection, a3);
        }
        xs.extend(candidates.iter().map(|c| c.x));
        xs.sort_unstable();
        // Frozen by the powering oracle on the canonical Klein triple.
        assert_eq!(xs, vec![3, 4, 4, 7, 7]);
    }

    #[test]
    fn candidates_require_237() {
        let pgl5 = Arc::new(projective_group_default(5, ProjectiveKind::Pgl).unwrap());
        let action = search_epimorphisms(TriangleSignature::new(2, 4, 5).unwrap(), &pgl5, BOUND)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        assert!(matches!(thm1_candidates(&action), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn klein_extensions_are_kernel_free() {
        let action = klein_action();
        let extensions = extend_thm1_all(&action, BOUND).unwrap();
        assert_eq!(extensions.len(), 5);
        for ext in &extensions {
            // Restriction to the first three generators equals the action.
            assert_eq!(&ext.psi_images()[..3], action.images().as_slice());
            assert!(ext.kernel_free(), "every Klein candidate verifies free");
            for entry in ext.transcript() {
                assert!(entry.injective);
                assert_eq!(entry.abstract_order, entry.image_order);
            }
            // The variable relation holds by definition of x.
            let x = ext.candidate().unwrap().x;
            assert!(ext.psi_images()[1]
                .compose(&ext.psi_images()[3])
                .pow(x as u64)
                .is_identity());
            // Surjectivity is inherited: the images contain the base triple.
            let order = closure(action.group().degree(), ext.psi_images(), BOUND)
                .unwrap()
                .len() as u64;
            assert_eq!(order, action.group().order());
        }
        let selected = select_extension(&extensions).unwrap();
        assert_eq!(extensions[selected].candidate().unwrap().x, 3);
    }

    #[test]
    fn transcript_contains_edge_dihedrals() {
        let action = klein_action();
        let ext = &extend_thm1_all(&action, BOUND).unwrap()[0];
        let d14 = ext
            .transcript()
            .iter()
            .find(|e| e.subset == vec![0, 2])
            .expect("the (r1, r3) edge must be checked");
        assert_eq!(d14.abstract_order, 14);
        assert_eq!(d14.image_order, 14);
        assert!(d14.injective);
    }

    /// Hand-built collapse: reusing the second image as the fourth makes the
    /// (r2, r4) parabolic collapse, and every superset fails with it.
    #[test]
    fn synthetic_collapse_detected_and_monotone() {
        let action = klein_action();
        let [a1, a2, a3] = action.images().clone();
        let (_, cm) = build_tetrahedron(2).unwrap();
        let images = vec![a1, a2.clone(), a3, a2];
        let (kernel_free, transcript) = verify_free_kernel(&cm, &images, BOUND).unwrap();
        assert!(!kernel_free);
        let edge = transcript.iter().find(|e| e.subset == vec![1, 3]).unwrap();
        assert!(!edge.injective);
        assert_eq!(edge.abstract_order, 4);
        assert_eq!(edge.image_order, 2);
        // Monotonicity: any finite superset of a failing subset fails.
        for entry in &transcript {
            if entry.subset.len() > 2 && [1usize, 3].iter().all(|i| entry.subset.contains(i)) {
                assert!(!entry.injective);
            }
        }
        // The spherical vertex subset is present and fails.
        let vertex = transcript.iter().find(|e| e.subset == vec![0, 1, 3]).unwrap();
        assert_eq!(vertex.abstract_order, 28);
        assert!(!vertex.injective);
    }

    #[test]
    fn thm2_reduces_to_base_orders() {
        let pgl5 = Arc::new(projective_group_default(5, ProjectiveKind::Pgl).unwrap());
        let action = search_epimorphisms(TriangleSignature::new(2, 4, 5).unwrap(), &pgl5, BOUND)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        let ext = extend_thm2(&action, BOUND).unwrap();
        assert!(ext.kernel_free());
        assert_eq!(ext.psi_images().len(), 6);
        assert_eq!(ext.psi_images()[0], ext.psi_images()[3]);
        assert_eq!(ext.psi_images()[1], ext.psi_images()[4]);
        assert_eq!(ext.psi_images()[2], ext.psi_images()[5]);
        // Nine rank-2 transcript entries, each the dihedral of a base edge.
        let rank2: Vec<_> = ext.transcript().iter().filter(|e| e.subset.len() == 2).collect();
        assert_eq!(rank2.len(), 9);
        let (p, q, r) = action.signature().as_tuple();
        for e in rank2 {
            assert!(e.injective);
            assert!([2 * p as u64, 2 * q as u64, 2 * r as u64].contains(&e.abstract_order));
        }
        // Surjectivity: the images generate the full group.
        let order = closure(action.group().degree(), ext.psi_images(), BOUND)
            .unwrap()
            .len() as u64;
        assert_eq!(order, action.group().order());
    }

    #[test]
    fn thm2_on_lifted_action() {
        let pgl5 = Arc::new(projective_group_default(5, ProjectiveKind::Pgl).unwrap());
        let action = search_epimorphisms(TriangleSignature::new(2, 4, 5).unwrap(), &pgl5, BOUND)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        let lift = crate::surface::lift_double_cover(&action, BOUND).unwrap();
        let ext = extend_thm2(lift.lifted(), BOUND).unwrap();
        assert!(ext.kernel_free());
    }

    #[test]
    fn verify_free_kernel_rejects_wrong_arity() {
        let (_, cm) = build_tetrahedron(3).unwrap();
        let id = Permutation::identity(4);
        assert!(matches!(
            verify_free_kernel(&cm, &[id], BOUND),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn empty_and_singleton_transcript_entries() {
        let z2 = GeneratedGroup::generate_default(2, vec![Permutation::from_images(&[1, 0]).unwrap()])
            .unwrap();
        let a = z2.generators()[0].clone();
        let (_, cm) = build_tetrahedron(2).unwrap();
        let (_, transcript) = verify_free_kernel(&cm, &[a.clone(), a.clone(), a.clone(), a], BOUND).unwrap();
        assert_eq!(transcript[0].subset, Vec::<usize>::new());
        assert_eq!(transcript[0].abstract_order, 1);
        assert_eq!(transcript[0].image_order, 1);
        assert!(transcript[0].injective);
        for e in transcript.iter().filter(|e| e.subset.len() == 1) {
            assert_eq!(e.abstract_order, 2);
            assert_eq!(e.image_order, 2);
        }
    }
}
