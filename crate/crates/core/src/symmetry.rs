//! Finite Abelian point groups, their characters and the representations they
//! induce on screw space.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{binomial, induced_rep, LexIndex};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{int, rational_to_f64, Field, Rational, RootOfUnity, COMPLEX_ZERO_TOL};

/// `Z/k_1 × … × Z/k_l`, written additively. The empty product is the
/// trivial group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    orders: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<u32>);

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl AbelianGroup {
    pub fn new(orders: Vec<u32>) -> Result<Self> {
        if let Some(k) = orders.iter().find(|&&k| k < 2) {
            return Err(Error::Input(format!("cyclic factor of order {k}; orders must be >= 2")));
        }
        Ok(Self { orders })
    }

    pub fn trivial() -> Self {
        Self { orders: Vec::new() }
    }

    /// `(Z/2)^l`.
    pub fn elementary(l: usize) -> Self {
        Self {
            orders: vec![2; l],
        }
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> usize {
        self.orders.iter().map(|&k| k as usize).product()
    }

    pub fn is_elementary_abelian_2(&self) -> bool {
        self.orders.iter().all(|&k| k == 2)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.orders.len()])
    }

    /// Reduces components into canonical range.
    pub fn element(&self, comps: &[i64]) -> Result<GroupElement> {
        if comps.len() != self.orders.len() {
            return Err(Error::Input(format!(
                "group element {comps:?} has {} components, group has {}",
                comps.len(),
                self.orders.len()
            )));
        }
        Ok(GroupElement(
            comps
                .iter()
                .zip(&self.orders)
                .map(|(&c, &k)| c.rem_euclid(k as i64) as u32)
                .collect(),
        ))
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.0.len() == self.orders.len() && g.0.iter().zip(&self.orders).all(|(c, k)| c < k)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.orders)
                .map(|((x, y), k)| (x + y) % k)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.orders)
                .map(|(x, k)| (k - x) % k)
                .collect(),
        )
    }

    pub fn is_identity(&self, a: &GroupElement) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    /// Order of an element.
    pub fn element_order(&self, a: &GroupElement) -> usize {
        let mut x = a.clone();
        let mut n = 1;
        while !self.is_identity(&x) {
            x = self.add(&x, a);
            n += 1;
        }
        n
    }

    /// All elements, first component most significant.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order()).map(|i| self.element_at(i)).collect()
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut comps = vec![0; self.orders.len()];
        for t in (0..self.orders.len()).rev() {
            let k = self.orders[t] as usize;
            comps[t] = (index % k) as u32;
            index /= k;
        }
        GroupElement(comps)
    }

    pub fn index_of(&self, a: &GroupElement) -> usize {
        a.0.iter()
            .zip(&self.orders)
            .fold(0, |acc, (&c, &k)| acc * k as usize + c as usize)
    }

    /// `ρ_j` takes only the values ±1.
    pub fn is_real_character(&self, j: &GroupElement) -> bool {
        j.0.iter().zip(&self.orders).all(|(&c, &k)| (2 * c) % k == 0)
    }
}

/// `ρ_j(i) = Π_t ω_t^{i_t j_t}` with `ω_t = exp(2πi / k_t)`.
pub fn irrep_value(group: &AbelianGroup, j: &GroupElement, i: &GroupElement) -> RootOfUnity {
    group
        .orders
        .iter()
        .zip(j.0.iter().zip(&i.0))
        .fold(RootOfUnity::one(), |acc, (&k, (&jt, &it))| {
            acc.mul(&RootOfUnity::new((jt as i64) * (it as i64), k as u64))
        })
}

/// An orthogonal representation `τ` of an Abelian group on `R^d`, given by
/// rational generator images.
#[derive(Clone, Debug)]
pub struct PointRepresentation {
    group: AbelianGroup,
    d: usize,
    generators: Vec<Matrix<Rational>>,
    images: Vec<Matrix<Rational>>,
    screw_images: Vec<Matrix<Rational>>,
}

fn is_orthogonal(a: &Matrix<Rational>) -> bool {
    a.is_square() && a.transpose().mul(a) == Matrix::identity(a.nrows())
}

impl PointRepresentation {
    /// Builds all images from the generator images and verifies the
    /// homomorphism property and faithfulness exhaustively.
    pub fn new(group: AbelianGroup, d: usize, generators: Vec<Matrix<Rational>>) -> Result<Self> {
        if generators.len() != group.rank() {
            return Err(Error::Representation(format!(
                "{} generator images for a group with {} cyclic factors",
                generators.len(),
                group.rank()
            )));
        }
        for (t, g) in generators.iter().enumerate() {
            if g.nrows() != d || g.ncols() != d {
                return Err(Error::Representation(format!(
                    "generator {t} is {}x{}, expected {d}x{d}",
                    g.nrows(),
                    g.ncols()
                )));
            }
            if !is_orthogonal(g) {
                return Err(Error::Representation(format!("generator {t} is not orthogonal")));
            }
        }
        let elements = group.elements();
        let images: Vec<Matrix<Rational>> = elements
            .iter()
            .map(|e| {
                e.0.iter()
                    .zip(&generators)
                    .fold(Matrix::identity(d), |acc, (&p, g)| {
                        (0..p).fold(acc, |m, _| m.mul(g))
                    })
            })
            .collect();
        for a in &elements {
            for b in &elements {
                let ab = group.add(a, b);
                let lhs = &images[group.index_of(&ab)];
                let rhs = images[group.index_of(a)].mul(&images[group.index_of(b)]);
                if *lhs != rhs {
                    return Err(Error::Representation(format!(
                        "not a homomorphism: τ({a}+{b}) ≠ τ({a})τ({b})"
                    )));
                }
            }
        }
        let identity = Matrix::identity(d);
        for (e, img) in elements.iter().zip(&images).skip(1) {
            if *img == identity {
                return Err(Error::Representation(format!(
                    "not faithful: τ({e}) is the identity"
                )));
            }
        }
        let screw_images = images
            .iter()
            .map(|m| induced_rep(&augment(m), 2))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            group,
            d,
            generators,
            images,
            screw_images,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `C(d+1, 2)`, the dimension of screw space.
    pub fn screw_dim(&self) -> usize {
        binomial(self.d + 1, 2)
    }

    pub fn generators(&self) -> &[Matrix<Rational>] {
        &self.generators
    }

    pub fn image(&self, g: &GroupElement) -> &Matrix<Rational> {
        &self.images[self.group.index_of(g)]
    }

    /// `τ̂(γ) = blockdiag(τ(γ), 1)`.
    pub fn augmented(&self, g: &GroupElement) -> Matrix<Rational> {
        augment(self.image(g))
    }

    /// `τ̂^(k)(γ)`, the induced action on the `k`-th exterior power.
    pub fn tau_hat_k(&self, g: &GroupElement, k: usize) -> Matrix<Rational> {
        induced_rep(&self.augmented(g), k).expect("square augmented matrix")
    }

    /// `τ̂^(2)(γ)`.
    pub fn tau_hat2(&self, g: &GroupElement) -> &Matrix<Rational> {
        &self.screw_images[self.group.index_of(g)]
    }

    /// True when every image is diagonal with entries ±1.
    pub fn is_diagonal_sign(&self) -> bool {
        self.images.iter().all(|m| {
            m.is_diagonal()
                && (0..self.d).all(|i| {
                    let x = m.get(i, i);
                    *x == int(1) || *x == int(-1)
                })
        })
    }

    /// The combinatorial characterization needs `(Z/2)^l` acting by diagonal
    /// sign matrices.
    pub fn require_combinatorial(&self) -> Result<()> {
        if !self.group.is_elementary_abelian_2() {
            return Err(Error::Unsupported(format!(
                "combinatorial test needs (Z/2Z)^l, got orders {:?}",
                self.group.orders()
            )));
        }
        if !self.is_diagonal_sign() {
            return Err(Error::Unsupported(
                "combinatorial test needs every τ(γ) diagonal with entries ±1".into(),
            ));
        }
        Ok(())
    }
}

fn augment(m: &Matrix<Rational>) -> Matrix<Rational> {
    let d = m.nrows();
    Matrix::from_fn(d + 1, d + 1, |i, j| {
        if i < d && j < d {
            m.get(i, j).clone()
        } else if i == j {
            int(1)
        } else {
            int(0)
        }
    })
}

/// `ρ_j(γ)^{-1} · τ̂^(2)(γ)` as a root of unity times a rational matrix,
/// realizable in any field containing the character values.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedImage {
    pub rho: RootOfUnity,
    pub base: Matrix<Rational>,
}

impl TwistedImage {
    pub fn to_field<T: Field>(&self) -> Option<Matrix<T>> {
        let s = T::from_root(self.rho.inverse())?;
        Some(self.base.map(|x| T::from_rational(x) * s.clone()))
    }

    /// The inverse `ρ_j(γ) · τ̂^(2)(γ)^T` (the base is orthogonal).
    pub fn inverse_to_field<T: Field>(&self) -> Option<Matrix<T>> {
        let s = T::from_root(self.rho)?;
        Some(self.base.transpose().map(|x| T::from_rational(x) * s.clone()))
    }
}

pub fn tau_hat2_j(rep: &PointRepresentation, j: &GroupElement, g: &GroupElement) -> TwistedImage {
    TwistedImage {
        rho: irrep_value(rep.group(), j, g),
        base: rep.tau_hat2(g).clone(),
    }
}

/// Dimension of the `ρ_j`-symmetric trivial motions:
/// `(1/|Γ|) Σ_γ trace(τ̂^(2)_j(γ))`.
pub fn trivial_motion_dim(rep: &PointRepresentation, j: &GroupElement) -> Result<usize> {
    let group = rep.group();
    let order = group.order();
    if group.is_real_character(j) {
        let mut sum = int(0);
        for g in group.elements() {
            let rho = irrep_value(group, j, &g).sign().expect("real character");
            sum += rep.tau_hat2(&g).trace() * int(rho as i64);
        }
        let avg = sum / int(order as i64);
        if !avg.is_integer() || avg < int(0) {
            return Err(Error::Representation(format!(
                "trivial motion count {avg} for irrep {j} is not a nonnegative integer"
            )));
        }
        return Ok(rational_to_f64(&avg) as usize);
    }
    let mut sum = num_complex::Complex64::new(0.0, 0.0);
    for g in group.elements() {
        let rho_inv = irrep_value(group, j, &g).inverse().to_complex();
        sum += rho_inv * rational_to_f64(&rep.tau_hat2(&g).trace());
    }
    let avg = sum / order as f64;
    let rounded = avg.re.round();
    if avg.im.abs() > COMPLEX_ZERO_TOL || (avg.re - rounded).abs() > COMPLEX_ZERO_TOL || rounded < 0.0
    {
        return Err(Error::Representation(format!(
            "trivial motion count {avg} for irrep {j} is not a nonnegative integer"
        )));
    }
    Ok(rounded as usize)
}

/// Basis of `{t : τ̂^(2)_j(γ) t = t for all γ}` over the field `T`.
pub fn fixed_subspace_basis<T: Field>(
    rep: &PointRepresentation,
    j: &GroupElement,
) -> Result<Vec<Vec<T>>> {
    let n = rep.screw_dim();
    let mut blocks = Vec::new();
    for g in rep.group().elements() {
        let m = tau_hat2_j(rep, j, &g).to_field::<T>().ok_or_else(|| {
            Error::Unsupported(format!("irrep {j} is not realizable over {}", T::NAME))
        })?;
        blocks.push(m.sub(&Matrix::identity(n)));
    }
    Ok(T::nullspace(&Matrix::stack(&blocks, n)))
}

/// `τ_g^{i,j}(γ)` for every screw coordinate pair `(i, j)`, indexed
/// `[pair][element]`. Requires `(Z/2)^l` with diagonal sign images.
pub fn induced_labelings(rep: &PointRepresentation, g: &GroupElement) -> Result<Vec<Vec<i8>>> {
    rep.require_combinatorial()?;
    let group = rep.group();
    let elements = group.elements();
    let n = rep.screw_dim();
    Ok((0..n)
        .map(|pair| {
            elements
                .iter()
                .map(|gamma| {
                    let rho = irrep_value(group, g, gamma).sign().expect("real character");
                    let entry = rep.tau_hat2(gamma).get(pair, pair);
                    let s = if *entry == int(1) { 1 } else { -1 };
                    (s * rho) as i8
                })
                .collect()
        })
        .collect())
}

/// `τ_g^{i,j}` for one pair `(i, j)` (0-based, `i < j`), indexed by element.
pub fn induced_labeling(
    rep: &PointRepresentation,
    g: &GroupElement,
    pair: (usize, usize),
) -> Result<Vec<i8>> {
    let idx = LexIndex::new(rep.dim() + 1, 2);
    let pos = idx
        .position(&[pair.0, pair.1])
        .ok_or_else(|| Error::Input(format!("no screw coordinate {pair:?}")))?;
    Ok(induced_labelings(rep, g)?.swap_remove(pos))
}

/// Diagonal sign representations used throughout tests and fixtures.
pub mod presets {
    use super::*;

    fn diag(signs: &[i64]) -> Matrix<Rational> {
        Matrix::diagonal(&signs.iter().map(|&s| int(s)).collect::<Vec<_>>())
    }

    /// Reflection in the x–y plane.
    pub fn mirror_xy() -> PointRepresentation {
        PointRepresentation::new(AbelianGroup::elementary(1), 3, vec![diag(&[1, 1, -1])]).unwrap()
    }

    /// Half-turn about the x axis.
    pub fn half_turn_x() -> PointRepresentation {
        PointRepresentation::new(AbelianGroup::elementary(1), 3, vec![diag(&[1, -1, -1])]).unwrap()
    }

    /// Point inversion.
    pub fn inversion() -> PointRepresentation {
        PointRepresentation::new(AbelianGroup::elementary(1), 3, vec![diag(&[-1, -1, -1])])
            .unwrap()
    }

    /// Two mirrors (x–z and y–z planes); their product is a half-turn about z.
    pub fn two_mirrors() -> PointRepresentation {
        PointRepresentation::new(
            AbelianGroup::elementary(2),
            3,
            vec![diag(&[1, -1, 1]), diag(&[-1, 1, 1])],
        )
        .unwrap()
    }

    /// Half-turns about x and y.
    pub fn two_half_turns() -> PointRepresentation {
        PointRepresentation::new(
            AbelianGroup::elementary(2),
            3,
            vec![diag(&[1, -1, -1]), diag(&[-1, 1, -1])],
        )
        .unwrap()
    }

    /// Half-turn about z and the x–y mirror.
    pub fn half_turn_and_mirror() -> PointRepresentation {
        PointRepresentation::new(
            AbelianGroup::elementary(2),
            3,
            vec![diag(&[-1, -1, 1]), diag(&[1, 1, -1])],
        )
        .unwrap()
    }

    pub fn trivial(d: usize) -> PointRepresentation {
        PointRepresentation::new(AbelianGroup::trivial(), d, Vec::new()).unwrap()
    }

    /// Quarter turn about z, a faithful `Z/4` action with complex characters.
    pub fn quarter_turn() -> PointRepresentation {
        let m = Matrix::from_rows(
            vec![
                vec![int(0), int(-1), int(0)],
                vec![int(1), int(0), int(0)],
                vec![int(0), int(0), int(1)],
            ],
            3,
        );
        PointRepresentation::new(AbelianGroup::new(vec![4]).unwrap(), 3, vec![m]).unwrap()
    }

    /// Cyclic permutation of the axes, a faithful `Z/3` action.
    pub fn axis_cycle() -> PointRepresentation {
        let m = Matrix::from_rows(
            vec![
                vec![int(0), int(0), int(1)],
                vec![int(1), int(0), int(0)],
                vec![int(0), int(1), int(0)],
            ],
            3,
        );
        PointRepresentation::new(AbelianGroup::new(vec![3]).unwrap(), 3, vec![m]).unwrap()
    }

    pub fn all_elementary_d3() -> Vec<(&'static str, PointRepresentation)> {
        vec![
            ("mirror", mirror_xy()),
            ("half-turn", half_turn_x()),
            ("inversion", inversion()),
            ("two-mirrors", two_mirrors()),
            ("two-half-turns", two_half_turns()),
            ("half-turn-mirror", half_turn_and_mirror()),
        ]
    }
}
