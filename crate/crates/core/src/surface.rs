//! Surface actions: validated surjections from an extended triangle group
//! onto a finite permutation group with torsion-free kernel.
//!
//! A valid action is a triple of involutions whose pairwise products have
//! exactly the signature orders, whose edge dihedrals embed faithfully (this
//! is precisely torsion-freeness of the kernel, since every torsion element of
//! the extended triangle group is conjugate into an edge dihedral), and which
//! generate the group. From the action we derive the quotient surface's Euler
//! characteristic, orientability, genus, and Hurwitz maximality class, all in
//! exact arithmetic.

use std::collections::HashSet;
use std::sync::Arc;

use num::rational::Ratio;

use crate::coxeter::check_hyperbolic;
use crate::error::{ActionCheck, Error};
use crate::permgroup::{
    closure, dihedral_analysis, lift_odd, sign_character, swap_involution, GeneratedGroup,
    Permutation, SignCharacter,
};
use crate::Result;

/// A hyperbolic triangle signature `(p, q, r)` with `1/p + 1/q + 1/r < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriangleSignature {
    p: u32,
    q: u32,
    r: u32,
}

impl TriangleSignature {
    pub fn new(p: u32, q: u32, r: u32) -> Result<Self> {
        check_hyperbolic(p, q, r)?;
        Ok(TriangleSignature { p, q, r })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn as_tuple(&self) -> (u32, u32, u32) {
        (self.p, self.q, self.r)
    }

    /// Whether this is the `(2,3,7)` signature, the one with minimal co-area
    /// (and the only one the tetrahedral extension applies to).
    pub fn is_237(&self) -> bool {
        (self.p, self.q, self.r) == (2, 3, 7)
    }
}

impl std::fmt::Display for TriangleSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{},{}]", self.p, self.q, self.r)
    }
}

/// Hurwitz maximality classification of a validated action.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HurwitzClass {
    /// Not of maximal order.
    None,
    /// Orientable surface with the maximal order `168(g-1)`.
    OrientationReversingHurwitz,
    /// Nonorientable surface with the maximal order `84(genus-2)`.
    NonorientableHurwitz,
}

impl HurwitzClass {
    pub fn as_str(self) -> &'static str {
        match self {
            HurwitzClass::None => "none",
            HurwitzClass::OrientationReversingHurwitz => "orientation_reversing_hurwitz",
            HurwitzClass::NonorientableHurwitz => "nonorientable_hurwitz",
        }
    }
}

/// A validated surjection from the extended triangle group of a signature onto
/// a finite permutation group, with the derived surface data.
#[derive(Clone, Debug)]
pub struct SurfaceAction {
    signature: TriangleSignature,
    group: Arc<GeneratedGroup>,
    images: [Permutation; 3],
    euler_characteristic: i64,
    orientable: bool,
    genus: u32,
    surface_character: Option<SignCharacter>,
    hurwitz_class: HurwitzClass,
}

impl SurfaceAction {
    pub fn signature(&self) -> TriangleSignature {
        self.signature
    }

    pub fn group(&self) -> &Arc<GeneratedGroup> {
        &self.group
    }

    pub fn images(&self) -> &[Permutation; 3] {
        &self.images
    }

    /// Euler characteristic of the quotient surface.
    pub fn euler_characteristic(&self) -> i64 {
        self.euler_characteristic
    }

    pub fn orientable(&self) -> bool {
        self.orientable
    }

    /// Genus if orientable, crosscap number if not.
    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// The orientation character of the surface, present iff orientable.
    pub fn surface_character(&self) -> Option<&SignCharacter> {
        self.surface_character.as_ref()
    }

    pub fn hurwitz_class(&self) -> HurwitzClass {
        self.hurwitz_class
    }

    /// Builds the classifier deciding which involutions act freely on the
    /// surface and which reverse orientation.
    pub fn involution_classifier(&self, bound: usize) -> Result<InvolutionClassifier> {
        let degree = self.group.degree();
        let pairs = [(0usize, 1usize), (1, 2), (2, 0)];
        let mut torsion_images: Vec<Permutation> = Vec::new();
        for (i, j) in pairs {
            let dihedral = closure(
                degree,
                &[self.images[i].clone(), self.images[j].clone()],
                bound,
            )?;
            torsion_images.extend(dihedral.into_iter().filter(|d| !d.is_identity()));
        }
        // Elements with fixed points on the surface are exactly the conjugates
        // of nontrivial torsion images.
        let mut fixed_locus = HashSet::new();
        for g in self.group.elements() {
            let g_inverse = g.inverse();
            for d in &torsion_images {
                fixed_locus.insert(d.conjugate_by(g, &g_inverse));
            }
        }
        Ok(InvolutionClassifier {
            fixed_locus,
            character: self.surface_character.clone(),
            group: Arc::clone(&self.group),
        })
    }
}

/// Exact Euler characteristic of the quotient surface:
/// `|G| · (-1 + 1/p + 1/q + 1/r) / 2`.
fn euler_characteristic(order: u64, sig: TriangleSignature) -> Result<i64> {
    let (p, q, r) = sig.as_tuple();
    let chi = Ratio::new(order as i64, 1)
        * (Ratio::new(-1, 1)
            + Ratio::new(1, p as i64)
            + Ratio::new(1, q as i64)
            + Ratio::new(1, r as i64))
        / Ratio::new(2, 1);
    if !chi.is_integer() {
        return Err(Error::Internal(format!(
            "Euler characteristic {chi} is not an integer"
        )));
    }
    Ok(chi.to_integer())
}

/// Validates a candidate surjection and derives the surface data.
///
/// Checks run in order: images lie in the group, images are involutions, the
/// pairwise products have exactly the signature orders, the three edge
/// dihedrals map injectively, and the images generate. The first failure is
/// reported as [`Error::ActionRejected`].
pub fn validate_action(
    signature: TriangleSignature,
    group: Arc<GeneratedGroup>,
    images: [Permutation; 3],
    bound: usize,
) -> Result<SurfaceAction> {
    for (which, image) in images.iter().enumerate() {
        if !group.contains(image) {
            return Err(Error::ActionRejected(ActionCheck::ImageNotInGroup { which: which + 1 }));
        }
    }
    for (which, image) in images.iter().enumerate() {
        let order = image.order();
        if order != 2 {
            return Err(Error::ActionRejected(ActionCheck::NotInvolution {
                which: which + 1,
                order,
            }));
        }
    }
    let (p, q, r) = signature.as_tuple();
    let edge_orders = [((0usize, 1usize), p), ((1, 2), q), ((2, 0), r)];
    for ((i, j), m) in edge_orders {
        let got = images[i].compose(&images[j]).order();
        if got != m as u64 {
            return Err(Error::ActionRejected(ActionCheck::EdgeOrder {
                faces: (i + 1, j + 1),
                expected: m as u64,
                got,
            }));
        }
    }
    for ((i, j), m) in edge_orders {
        let analysis = dihedral_analysis(&images[i], &images[j], bound)?;
        if !analysis.is_faithful_dihedral {
            return Err(Error::ActionRejected(ActionCheck::EdgeDihedral {
                faces: (i + 1, j + 1),
                expected: 2 * m as u64,
                got: analysis.subgroup_order,
            }));
        }
    }
    let generated = closure(group.degree(), &images, bound)?;
    if generated.len() as u64 != group.order() {
        return Err(Error::ActionRejected(ActionCheck::NotSurjective {
            got: generated.len() as u64,
            want: group.order(),
        }));
    }

    let chi = euler_characteristic(group.order(), signature)?;
    let character = sign_character(&group, &images, bound)?;
    let orientable = character.is_some();
    let genus = if orientable {
        if chi % 2 != 0 {
            return Err(Error::Internal(format!(
                "orientable surface with odd Euler characteristic {chi}"
            )));
        }
        (2 - chi) / 2
    } else {
        2 - chi
    };
    if genus < 0 {
        return Err(Error::Internal(format!("negative genus {genus}")));
    }
    let genus = genus as u32;

    let sorted = {
        let mut s = [p, q, r];
        s.sort_unstable();
        s
    };
    let order = group.order();
    let hurwitz_class = if sorted == [2, 3, 7] {
        if orientable && genus >= 1 && order == 168 * (genus as u64 - 1) {
            HurwitzClass::OrientationReversingHurwitz
        } else if !orientable && genus >= 2 && order == 84 * (genus as u64 - 2) {
            HurwitzClass::NonorientableHurwitz
        } else {
            HurwitzClass::None
        }
    } else {
        HurwitzClass::None
    };

    Ok(SurfaceAction {
        signature,
        group,
        images,
        euler_characteristic: chi,
        orientable,
        genus,
        surface_character: character,
        hurwitz_class,
    })
}

/// Canonical representative of a triple under simultaneous conjugation: the
/// lexicographically least conjugate triple over all group elements.
fn canonical_triple(
    images: &[Permutation; 3],
    conjugators: &[(Permutation, Permutation)],
) -> [Permutation; 3] {
    let mut best: Option<[Permutation; 3]> = None;
    for (g, g_inverse) in conjugators {
        let candidate = [
            images[0].conjugate_by(g, g_inverse),
            images[1].conjugate_by(g, g_inverse),
            images[2].conjugate_by(g, g_inverse),
        ];
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    }
    best.expect("group is nonempty")
}

/// Exhaustively searches for valid actions of a signature on a group, up to
/// simultaneous conjugation by group elements.
///
/// Results are returned in canonical (lexicographically sorted) order, each
/// built from the least representative of its conjugacy class, so the output
/// is deterministic.
pub fn search_epimorphisms(
    signature: TriangleSignature,
    group: &Arc<GeneratedGroup>,
    bound: usize,
) -> Result<Vec<SurfaceAction>> {
    let (p, q, r) = signature.as_tuple();
    let involutions = group.involutions();
    let conjugators: Vec<(Permutation, Permutation)> = group
        .elements()
        .iter()
        .map(|g| (g.clone(), g.inverse()))
        .collect();

    let mut classes: std::collections::BTreeSet<[Permutation; 3]> = Default::default();
    for a1 in &involutions {
        for a2 in &involutions {
            if a1.compose(a2).order() != p as u64 {
                continue;
            }
            for a3 in &involutions {
                if a2.compose(a3).order() != q as u64 || a3.compose(a1).order() != r as u64 {
                    continue;
                }
                let triple = [a1.clone(), a2.clone(), a3.clone()];
                let valid = validate_action(signature, Arc::clone(group), triple.clone(), bound);
                match valid {
                    Ok(_) => {
                        classes.insert(canonical_triple(&triple, &conjugators));
                    }
                    Err(Error::ActionRejected(_)) => {}
                    Err(other) => return Err(other),
                }
            }
        }
    }
    classes
        .into_iter()
        .map(|triple| validate_action(signature, Arc::clone(group), triple, bound))
        .collect()
}

/// Verdicts of [`InvolutionClassifier::analyze`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvolutionAnalysis {
    pub orientation_reversing: bool,
    pub fixed_point_free: bool,
}

/// Classifies involutions of the acting group: orientation behaviour via the
/// surface character, freeness via the exhaustive conjugate-torsion locus.
#[derive(Clone, Debug)]
pub struct InvolutionClassifier {
    fixed_locus: HashSet<Permutation>,
    character: Option<SignCharacter>,
    group: Arc<GeneratedGroup>,
}

impl InvolutionClassifier {
    pub fn analyze(&self, t: &Permutation) -> Result<InvolutionAnalysis> {
        if !self.group.contains(t) {
            return Err(Error::InvalidInput("involution is not in the acting group".into()));
        }
        if !t.is_involution() {
            return Err(Error::InvalidInput(format!(
                "element has order {}, not 2",
                t.order()
            )));
        }
        let character = self.character.as_ref().ok_or_else(|| {
            Error::Semantic(
                "orientation-reversing is undefined on a nonorientable surface".into(),
            )
        })?;
        Ok(InvolutionAnalysis {
            orientation_reversing: character.sign(t) == -1,
            fixed_point_free: !self.fixed_locus.contains(t),
        })
    }

    /// Elements of the group that fix at least one point of the surface.
    pub fn fixed_locus_size(&self) -> usize {
        self.fixed_locus.len()
    }
}

/// One-shot involution analysis; builds the classifier internally.
pub fn involution_analysis(
    action: &SurfaceAction,
    t: &Permutation,
    bound: usize,
) -> Result<InvolutionAnalysis> {
    action.involution_classifier(bound)?.analyze(t)
}

/// A nonorientable action together with its lift to the orientable double
/// cover.
#[derive(Clone, Debug)]
pub struct DoubleCoverLift {
    base: SurfaceAction,
    lifted: SurfaceAction,
    deck_involution: Permutation,
}

impl DoubleCoverLift {
    pub fn base(&self) -> &SurfaceAction {
        &self.base
    }

    pub fn lifted(&self) -> &SurfaceAction {
        &self.lifted
    }

    pub fn lifted_group(&self) -> &Arc<GeneratedGroup> {
        self.lifted.group()
    }

    /// The central, orientation-reversing, fixed-point-free covering
    /// involution.
    pub fn deck_involution(&self) -> &Permutation {
        &self.deck_involution
    }
}

/// Lifts a nonorientable action to the orientable double cover.
///
/// The lifted group acts on the disjoint union of two copies of the point
/// set; each generator image lifts to its copy-swapping form, and the deck
/// involution is the bare copy swap. Every property the construction promises
/// (order doubling, orientability, genus drop, the deck involution being
/// central, orientation-reversing and fixed-point-free) is re-verified rather
/// than assumed.
pub fn lift_double_cover(action: &SurfaceAction, bound: usize) -> Result<DoubleCoverLift> {
    if action.orientable() {
        return Err(Error::InvalidInput(
            "double-cover lift requires a nonorientable action".into(),
        ));
    }
    let degree = action.group().degree();
    let lifted_images = [
        lift_odd(&action.images()[0]),
        lift_odd(&action.images()[1]),
        lift_odd(&action.images()[2]),
    ];
    let lifted_group = Arc::new(GeneratedGroup::generate(
        2 * degree,
        lifted_images.to_vec(),
        bound,
    )?);
    if lifted_group.order() != 2 * action.group().order() {
        return Err(Error::Internal(format!(
            "lifted group has order {}, expected {}",
            lifted_group.order(),
            2 * action.group().order()
        )));
    }
    let lifted = validate_action(
        action.signature(),
        Arc::clone(&lifted_group),
        lifted_images.clone(),
        bound,
    )?;
    if !lifted.orientable() {
        return Err(Error::Internal("double cover is not orientable".into()));
    }
    if lifted.euler_characteristic() != 2 * action.euler_characteristic() {
        return Err(Error::Internal(
            "lifted Euler characteristic did not double".into(),
        ));
    }
    if lifted.genus() + 1 != action.genus() {
        return Err(Error::Internal(format!(
            "lifted genus {} is not base genus {} minus 1",
            lifted.genus(),
            action.genus()
        )));
    }
    let tau = swap_involution(degree);
    if !lifted_group.contains(&tau) {
        return Err(Error::Internal("deck involution missing from lifted group".into()));
    }
    for image in &lifted_images {
        if tau.compose(image) != image.compose(&tau) {
            return Err(Error::Internal("deck involution is not central".into()));
        }
    }
    let analysis = involution_analysis(&lifted, &tau, bound)?;
    if !analysis.orientation_reversing {
        return Err(Error::Internal("deck involution preserves orientation".into()));
    }
    if !analysis.fixed_point_free {
        return Err(Error::Internal("deck involution has fixed points".into()));
    }
    Ok(DoubleCoverLift {
        base: action.clone(),
        lifted,
        deck_involution: tau,
    })
}
