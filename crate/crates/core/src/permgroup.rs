//! Exact finite-group engine: permutations, generated subgroups, element
//! orders, dihedral analysis, projective-group builders and sign characters.
//!
//! Groups are represented by faithful permutation actions throughout; matrix
//! groups over prime fields are converted to permutations of the projective
//! line. Enumeration is breadth-first closure under a hard configurable bound,
//! which keeps every computation exact and certifiable at desk scale.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num::integer::lcm;
use serde::Serialize;

use crate::error::Error;
use crate::{Result, DEFAULT_ENUMERATION_BOUND};

/// A permutation of `{0, …, degree-1}`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<u16>,
}

impl Permutation {
    /// The identity permutation on `degree` points.
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u16).collect(),
        }
    }

    /// Builds a permutation from an image array, checking it is a bijection.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let degree = images.len();
        if degree > u16::MAX as usize {
            return Err(Error::InvalidPermutation(format!(
                "degree {degree} exceeds the supported maximum"
            )));
        }
        let mut seen = vec![false; degree];
        for &i in images {
            if i >= degree {
                return Err(Error::InvalidPermutation(format!(
                    "image {i} out of range for degree {degree}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidPermutation(format!("image {i} repeated")));
            }
            seen[i] = true;
        }
        Ok(Permutation {
            images: images.iter().map(|&i| i as u16).collect(),
        })
    }

    /// Builds a permutation on `degree` points from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for w in 0..cycle.len() {
                let from = cycle[w];
                let to = cycle[(w + 1) % cycle.len()];
                if from >= degree || to >= degree {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle point out of range for degree {degree}"
                    )));
                }
                images[from] = to;
            }
        }
        Permutation::from_images(&images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u16 == j)
    }

    /// Functional composition: `(self ∘ other)(i) = self(other(i))`,
    /// i.e. `other` acts first. Panics on degree mismatch; the public
    /// entry point with an input-error contract is [`compose_and_order`].
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in compose");
        Permutation {
            images: other.images.iter().map(|&i| self.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u16; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u16;
        }
        Permutation { images }
    }

    pub fn pow(&self, exponent: u64) -> Permutation {
        let mut result = Permutation::identity(self.degree());
        for _ in 0..exponent {
            result = result.compose(self);
        }
        result
    }

    /// Order of the permutation, as the lcm of its cycle lengths.
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut order = 1u64;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut point = start;
            while !seen[point] {
                seen[point] = true;
                point = self.images[point] as usize;
                len += 1;
            }
            order = lcm(order, len);
        }
        order
    }

    pub fn is_involution(&self) -> bool {
        self.order() == 2
    }

    /// Conjugate `self` by `g`: returns `g⁻¹ ∘ self ∘ g`.
    pub fn conjugate_by(&self, g: &Permutation, g_inverse: &Permutation) -> Permutation {
        g_inverse.compose(&self.compose(g))
    }

    fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut cycles = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut point = start;
            while !seen[point] {
                seen[point] = true;
                cycle.push(point);
                point = self.images[point] as usize;
            }
            if cycle.len() > 1 {
                cycles.push(cycle);
            }
        }
        cycles
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (k, p) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Composes two permutations and reports the order of the product.
///
/// The order is the least `n ≥ 1` with `(g∘h)ⁿ = id`, computed by cycle-length
/// lcm.
pub fn compose_and_order(g: &Permutation, h: &Permutation) -> Result<(Permutation, u64)> {
    if g.degree() != h.degree() {
        return Err(Error::DegreeMismatch {
            left: g.degree(),
            right: h.degree(),
        });
    }
    let product = g.compose(h);
    let order = product.order();
    Ok((product, order))
}

/// Breadth-first closure of a generating set, in deterministic BFS order.
///
/// Errors with [`Error::EnumerationBound`] as soon as the closure would exceed
/// `bound` elements.
pub fn closure(degree: usize, generators: &[Permutation], bound: usize) -> Result<Vec<Permutation>> {
    for g in generators {
        if g.degree() != degree {
            return Err(Error::DegreeMismatch {
                left: degree,
                right: g.degree(),
            });
        }
    }
    let identity = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::new();
    seen.insert(identity.clone());
    let mut elements = vec![identity];
    let mut head = 0;
    while head < elements.len() {
        let current = elements[head].clone();
        head += 1;
        for g in generators {
            let next = current.compose(g);
            if !seen.contains(&next) {
                if elements.len() + 1 > bound {
                    return Err(Error::EnumerationBound { bound });
                }
                seen.insert(next.clone());
                elements.push(next);
            }
        }
    }
    Ok(elements)
}

/// A finite permutation group with its elements fully enumerated.
#[derive(Clone, Debug)]
pub struct GeneratedGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl GeneratedGroup {
    /// Enumerates the group generated by `generators` on `degree` points.
    pub fn generate(degree: usize, generators: Vec<Permutation>, bound: usize) -> Result<Self> {
        let elements = closure(degree, &generators, bound)?;
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Ok(GeneratedGroup {
            degree,
            generators,
            elements,
            index,
        })
    }

    pub fn generate_default(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        Self::generate(degree, generators, DEFAULT_ENUMERATION_BOUND)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.index.contains_key(g)
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    /// All involutions, in enumeration order.
    pub fn involutions(&self) -> Vec<Permutation> {
        self.elements.iter().filter(|g| g.is_involution()).cloned().collect()
    }

    /// The direct product with a two-element group, acting on the disjoint
    /// union of two copies of the point set. Generators are the block-diagonal
    /// lifts of the original generators together with the copy-swapping
    /// involution.
    pub fn direct_product_with_z2(&self, bound: usize) -> Result<GeneratedGroup> {
        let mut generators: Vec<Permutation> = self
            .generators
            .iter()
            .map(|g| lift_even(g))
            .collect();
        generators.push(swap_involution(self.degree));
        GeneratedGroup::generate(2 * self.degree, generators, bound)
    }
}

/// Block-diagonal lift `(g, +1)` of `g` to the disjoint union of two copies of
/// its point set.
pub fn lift_even(g: &Permutation) -> Permutation {
    let d = g.degree();
    let mut images = Vec::with_capacity(2 * d);
    for i in 0..d {
        images.push(g.apply(i));
    }
    for i in 0..d {
        images.push(g.apply(i) + d);
    }
    Permutation::from_images(&images).expect("lift of a bijection is a bijection")
}

/// Copy-swapping lift `(g, -1)` of `g` to the disjoint union of two copies of
/// its point set.
pub fn lift_odd(g: &Permutation) -> Permutation {
    let d = g.degree();
    let mut images = Vec::with_capacity(2 * d);
    for i in 0..d {
        images.push(g.apply(i) + d);
    }
    for i in 0..d {
        images.push(g.apply(i));
    }
    Permutation::from_images(&images).expect("lift of a bijection is a bijection")
}

/// The involution swapping the two copies of a `degree`-point set.
pub fn swap_involution(degree: usize) -> Permutation {
    lift_odd(&Permutation::identity(degree))
}

/// Outcome of analyzing the subgroup generated by two involutions.
#[derive(Clone, Debug)]
pub struct DihedralAnalysis {
    /// Order of the product `a∘b`.
    pub rotation_order: u64,
    /// Order of `⟨a, b⟩`, by closure.
    pub subgroup_order: u64,
    /// The reflections `(ab)ᵏ ∘ a` for `0 ≤ k < rotation_order`.
    pub reflections: Vec<Permutation>,
    /// Whether `⟨a, b⟩` is dihedral of the full order `2·rotation_order`.
    pub is_faithful_dihedral: bool,
}

/// Analyzes the dihedral subgroup generated by two involutions.
///
/// Faithfulness (`subgroup_order == 2·rotation_order`) is exactly injectivity
/// of a homomorphism from the abstract dihedral group of the product order,
/// which is how the torsion-free-kernel tests use it.
pub fn dihedral_analysis(a: &Permutation, b: &Permutation, bound: usize) -> Result<DihedralAnalysis> {
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch {
            left: a.degree(),
            right: b.degree(),
        });
    }
    if !a.is_involution() {
        return Err(Error::InvalidInput(format!("first input has order {}, not 2", a.order())));
    }
    if !b.is_involution() {
        return Err(Error::InvalidInput(format!("second input has order {}, not 2", b.order())));
    }
    let product = a.compose(b);
    let rotation_order = product.order();
    let mut reflections = Vec::with_capacity(rotation_order as usize);
    let mut current = a.clone();
    for _ in 0..rotation_order {
        reflections.push(current.clone());
        current = product.compose(&current);
    }
    let subgroup_order = closure(a.degree(), &[a.clone(), b.clone()], bound)?.len() as u64;
    Ok(DihedralAnalysis {
        rotation_order,
        subgroup_order,
        reflections,
        is_faithful_dihedral: subgroup_order == 2 * rotation_order,
    })
}

/// Which projective group over the prime field to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectiveKind {
    Psl,
    Pgl,
}

impl ProjectiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProjectiveKind::Psl => "psl2",
            ProjectiveKind::Pgl => "pgl2",
        }
    }
}

/// Default cap on the prime for projective-group construction.
pub const DEFAULT_PRIME_BOUND: u64 = 31;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

fn primitive_root(p: u64) -> u64 {
    let mut factors = Vec::new();
    let mut n = p - 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&f| mod_pow(g, (p - 1) / f, p) != 1))
        .expect("every prime field has a primitive root")
}

/// The Möbius transformation `z ↦ (az+b)/(cz+d)` as a permutation of the
/// `q+1` points of the projective line (point `q` is the point at infinity).
fn mobius(a: u64, b: u64, c: u64, d: u64, q: u64) -> Permutation {
    let mut images = Vec::with_capacity(q as usize + 1);
    for z in 0..q {
        let num = (a * z + b) % q;
        let den = (c * z + d) % q;
        images.push(if den == 0 {
            q as usize
        } else {
            (num * mod_inverse(den, q) % q) as usize
        });
    }
    images.push(if c % q == 0 {
        q as usize
    } else {
        (a % q * mod_inverse(c, q) % q) as usize
    });
    Permutation::from_images(&images).expect("Möbius transformations are bijections")
}

/// Builds `PSL(2,q)` or `PGL(2,q)` acting on the projective line over the
/// field with `q` elements, from the standard Möbius generators.
///
/// `PSL(2,q)` has order `q(q²-1)/2` for odd `q`; `PGL(2,q)` has order
/// `q(q²-1)`. For `q = 2` the two coincide.
pub fn projective_group(q: u64, kind: ProjectiveKind, prime_bound: u64, bound: usize) -> Result<GeneratedGroup> {
    if !is_prime(q) {
        return Err(Error::InvalidInput(format!("{q} is not prime")));
    }
    if q > prime_bound {
        return Err(Error::InvalidInput(format!(
            "prime {q} exceeds the configured bound {prime_bound}"
        )));
    }
    let translation = mobius(1, 1, 0, 1, q);
    let mut generators = if q == 2 {
        vec![translation, mobius(0, 1, 1, 0, q)]
    } else {
        vec![translation, mobius(0, q - 1, 1, 0, q)]
    };
    if kind == ProjectiveKind::Pgl && q > 2 {
        generators.push(mobius(primitive_root(q), 0, 0, 1, q));
    }
    GeneratedGroup::generate(q as usize + 1, generators, bound)
}

/// Convenience wrapper with the default prime and enumeration bounds.
pub fn projective_group_default(q: u64, kind: ProjectiveKind) -> Result<GeneratedGroup> {
    projective_group(q, kind, DEFAULT_PRIME_BOUND, DEFAULT_ENUMERATION_BOUND)
}

/// A homomorphism `G → {±1}`, represented by its kernel (the even subgroup).
///
/// Valid to evaluate only on elements of the group it was computed for.
#[derive(Clone, Debug)]
pub struct SignCharacter {
    even: Arc<HashSet<Permutation>>,
    group_order: u64,
}

impl SignCharacter {
    pub fn sign(&self, g: &Permutation) -> i8 {
        if self.even.contains(g) {
            1
        } else {
            -1
        }
    }

    pub fn kernel_order(&self) -> u64 {
        self.even.len() as u64
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }
}

/// Computes the unique homomorphism `G → {±1}` sending every marked element to
/// `-1`, if it exists.
///
/// The kernel candidate is the even subgroup generated by all pairwise
/// products of marked elements; the character exists iff that subgroup has
/// index 2 (equivalently, no odd word in the marked elements equals an even
/// one). Uniqueness holds because the marked elements must generate `G`.
pub fn sign_character(
    group: &GeneratedGroup,
    marked: &[Permutation],
    bound: usize,
) -> Result<Option<SignCharacter>> {
    if marked.is_empty() {
        return Err(Error::InvalidInput("no marked elements given".into()));
    }
    for m in marked {
        if !group.contains(m) {
            return Err(Error::InvalidInput("marked element is not in the group".into()));
        }
    }
    let generated = closure(group.degree(), marked, bound)?;
    if generated.len() as u64 != group.order() {
        return Err(Error::InvalidInput(format!(
            "marked elements generate a subgroup of order {} < {}; character undetermined",
            generated.len(),
            group.order()
        )));
    }
    let mut pair_products = Vec::with_capacity(marked.len() * marked.len());
    for a in marked {
        for b in marked {
            pair_products.push(a.compose(b));
        }
    }
    let even = closure(group.degree(), &pair_products, bound)?;
    match group.order() / even.len() as u64 {
        1 => Ok(None),
        2 => {
            if marked.iter().any(|m| even.iter().any(|e| e == m)) {
                return Err(Error::Internal(
                    "index-2 even subgroup contains a marked element".into(),
                ));
            }
            Ok(Some(SignCharacter {
                even: Arc::new(even.into_iter().collect()),
                group_order: group.order(),
            }))
        }
        index => Err(Error::Internal(format!(
            "even subgroup has impossible index {index}"
        ))),
    }
}
