//! Finite-dimensional unital associative algebras by structure constants.

use std::fmt;

use crate::error::{Error, Result};
use crate::exactla::{unit_vec, vec_is_zero, Echelon, Mat, Scalar};

/// Which constructor produced an algebra. Used to pick canonical inner
/// products and human-readable basis labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Generic,
    Group,
    Clifford(Vec<Scalar>),
    TruncatedPolynomial(usize),
    Matrix(usize),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Algebra {
    dim: usize,
    /// `c[(i * dim + j) * dim + k]`: coefficient of `e_k` in `e_i e_j`.
    constants: Vec<Scalar>,
    unit: Vec<Scalar>,
    family: Family,
    left: Vec<Mat>,
    right: Vec<Mat>,
    generators: Vec<usize>,
}

/// The first identity an alleged algebra violates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraViolation {
    Shape(String),
    Associativity { i: usize, j: usize, k: usize },
    LeftUnit { i: usize },
    RightUnit { i: usize },
}

impl fmt::Display for AlgebraViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraViolation::Shape(msg) => write!(f, "malformed structure constants: {msg}"),
            AlgebraViolation::Associativity { i, j, k } => {
                write!(f, "(e{i} e{j}) e{k} != e{i} (e{j} e{k})")
            }
            AlgebraViolation::LeftUnit { i } => write!(f, "1 * e{i} != e{i}"),
            AlgebraViolation::RightUnit { i } => write!(f, "e{i} * 1 != e{i}"),
        }
    }
}

impl Algebra {
    /// Builds an algebra from `c[i][j][k]` and the unit, validating both
    /// axioms.
    pub fn from_structure_constants(c: Vec<Vec<Vec<Scalar>>>, unit: Vec<Scalar>) -> Result<Self> {
        let dim = c.len();
        let mut flat = Vec::with_capacity(dim * dim * dim);
        for (i, row) in c.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Validation(
                    AlgebraViolation::Shape(format!("c[{i}] has {} entries, expected {dim}", row.len()))
                        .to_string(),
                ));
            }
            for (j, v) in row.into_iter().enumerate() {
                if v.len() != dim {
                    return Err(Error::Validation(
                        AlgebraViolation::Shape(format!(
                            "c[{i}][{j}] has {} entries, expected {dim}",
                            v.len()
                        ))
                        .to_string(),
                    ));
                }
                flat.extend(v);
            }
        }
        if unit.len() != dim {
            return Err(Error::Validation(
                AlgebraViolation::Shape(format!("unit has {} entries, expected {dim}", unit.len()))
                    .to_string(),
            ));
        }
        let a = Self::build(dim, flat, unit, Family::Generic);
        match validate_algebra(&a) {
            None => Ok(a),
            Some(v) => Err(Error::Validation(v.to_string())),
        }
    }

    /// Builds without checking the axioms. `validate_algebra` reports what
    /// is wrong with the result.
    pub fn from_structure_constants_unchecked(
        dim: usize,
        constants: Vec<Scalar>,
        unit: Vec<Scalar>,
    ) -> Self {
        assert_eq!(constants.len(), dim * dim * dim);
        assert_eq!(unit.len(), dim);
        Self::build(dim, constants, unit, Family::Generic)
    }

    fn build(dim: usize, constants: Vec<Scalar>, unit: Vec<Scalar>, family: Family) -> Self {
        let at = |i: usize, j: usize, k: usize| constants[(i * dim + j) * dim + k].clone();
        let left = (0..dim)
            .map(|i| Mat::from_fn(dim, dim, |k, j| at(i, j, k)))
            .collect();
        let right = (0..dim)
            .map(|i| Mat::from_fn(dim, dim, |k, j| at(j, i, k)))
            .collect();
        let mut a = Algebra {
            dim,
            constants,
            unit,
            family,
            left,
            right,
            generators: Vec::new(),
        };
        a.generators = a.greedy_generators();
        a
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.constants[(i * self.dim + j) * self.dim + k]
    }

    pub fn structure_constants(&self) -> Vec<Vec<Vec<Scalar>>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| (0..self.dim).map(|k| self.constant(i, j, k).clone()).collect())
                    .collect()
            })
            .collect()
    }

    /// Matrix of `e_i · −`.
    pub fn left_mul(&self, i: usize) -> &Mat {
        &self.left[i]
    }

    /// Matrix of `− · e_i`.
    pub fn right_mul(&self, i: usize) -> &Mat {
        &self.right[i]
    }

    pub fn left_muls(&self) -> &[Mat] {
        &self.left
    }

    pub fn right_muls(&self) -> &[Mat] {
        &self.right
    }

    /// Matrix of `a · −` for an arbitrary element.
    pub fn left_mul_by(&self, a: &[Scalar]) -> Mat {
        combine(&self.left, a, self.dim)
    }

    /// Matrix of `− · a` for an arbitrary element.
    pub fn right_mul_by(&self, a: &[Scalar]) -> Mat {
        combine(&self.right, a, self.dim)
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        self.left_mul_by(a).mul_vec(b)
    }

    pub fn basis_product(&self, i: usize, j: usize) -> Vec<Scalar> {
        self.left[i].col(j)
    }

    pub fn basis(&self, i: usize) -> Vec<Scalar> {
        unit_vec(self.dim, i)
    }

    pub fn is_commutative(&self) -> bool {
        self.left == self.right
    }

    /// Basis indices generating the algebra, chosen greedily in index
    /// order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut sub = self.subalgebra(&gens);
        for i in 0..self.dim {
            if sub.rank() == self.dim {
                break;
            }
            if !sub.contains(&unit_vec(self.dim, i)) {
                gens.push(i);
                sub = self.subalgebra(&gens);
            }
        }
        gens
    }

    fn subalgebra(&self, gens: &[usize]) -> Echelon {
        let mut e = Echelon::new(self.dim);
        let mut queue = vec![self.unit.clone()];
        while let Some(v) = queue.pop() {
            if vec_is_zero(&v) || !e.insert(v.clone()) {
                continue;
            }
            for &g in gens {
                queue.push(self.left[g].mul_vec(&v));
            }
        }
        e
    }

    pub fn label(&self, i: usize) -> String {
        match &self.family {
            Family::Group => format!("g{i}"),
            Family::Clifford(d) => {
                let s = clifford_subsets(d.len())[i].clone();
                if s.is_empty() {
                    "1".into()
                } else {
                    format!("e{}", s.iter().map(|x| (x + 1).to_string()).collect::<String>())
                }
            }
            Family::TruncatedPolynomial(_) => match i {
                0 => "1".into(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            },
            Family::Matrix(k) => format!("E{}{}", i / k + 1, i % k + 1),
            Family::Generic => format!("e{i}"),
        }
    }

    /// Human-readable rendering of an element.
    pub fn format_element(&self, v: &[Scalar]) -> String {
        format_combination(v, |i| self.label(i))
    }
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra(dim {}, {:?})", self.dim, self.family)
    }
}

fn combine(mats: &[Mat], coeffs: &[Scalar], dim: usize) -> Mat {
    let mut out = Mat::zeros(dim, dim);
    for (m, c) in mats.iter().zip(coeffs) {
        out.add_scaled(c, m);
    }
    out
}

/// Renders `Σ v_i label(i)` with exact coefficients.
pub fn format_combination(v: &[Scalar], label: impl Fn(usize) -> String) -> String {
    let mut out = String::new();
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = if neg { -c } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !abs.is_one() {
            out.push_str(&abs.to_string());
            out.push('*');
        }
        out.push_str(&label(i));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Checks associativity and the unit axioms over all basis indices.
pub fn validate_algebra(a: &Algebra) -> Option<AlgebraViolation> {
    let n = a.dim;
    for i in 0..n {
        let lu = a.left_mul_by(&a.unit).col(i);
        if lu != unit_vec(n, i) {
            return Some(AlgebraViolation::LeftUnit { i });
        }
        let ru = a.right_mul_by(&a.unit).col(i);
        if ru != unit_vec(n, i) {
            return Some(AlgebraViolation::RightUnit { i });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let eij = a.basis_product(i, j);
            for k in 0..n {
                let lhs = a.right[k].mul_vec(&eij);
                let rhs = a.left[i].mul_vec(&a.basis_product(j, k));
                if lhs != rhs {
                    return Some(AlgebraViolation::Associativity { i, j, k });
                }
            }
        }
    }
    None
}

/// Group algebra from a Cayley table, `table[i][j] = index of g_i g_j`.
pub fn group_algebra(table: &[Vec<usize>]) -> Result<Algebra> {
    let n = table.len();
    let not_group = |msg: String| Err(Error::Validation(format!("table is not a group: {msg}")));
    if n == 0 {
        return not_group("empty table".into());
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return not_group(format!("row {i} has {} entries, expected {n}", row.len()));
        }
        if let Some(&x) = row.iter().find(|&&x| x >= n) {
            return not_group(format!("row {i} contains out-of-range element {x}"));
        }
    }
    let Some(id) = (0..n).find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g)) else {
        return not_group("no identity element".into());
    };
    for g in 0..n {
        if !(0..n).any(|h| table[g][h] == id && table[h][g] == id) {
            return not_group(format!("element {g} has no inverse"));
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return not_group(format!("({a} {b}) {c} != {a} ({b} {c})"));
                }
            }
        }
    }
    let mut constants = vec![Scalar::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            constants[(i * n + j) * n + table[i][j]] = Scalar::one();
        }
    }
    Ok(Algebra::build(n, constants, unit_vec(n, id), Family::Group))
}

/// Cayley table of ℤ/n.
pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect()
}

/// Cayley table of S₃, elements listed as permutations of {0,1,2} in
/// lexicographic order (the identity first).
pub fn symmetric3_table() -> Vec<Vec<usize>> {
    let perms: Vec<[usize; 3]> = vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("permutation");
    perms
        .iter()
        .map(|p| {
            perms
                .iter()
                // (p q)(x) = p(q(x))
                .map(|q| index([p[q[0]], p[q[1]], p[q[2]]]))
                .collect()
        })
        .collect()
}

/// Subsets of `{0..m}` ordered by size, then lexicographically.
pub fn clifford_subsets(m: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (0u32..1 << m)
        .map(|mask| (0..m).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// Clifford algebra of the diagonal form `b(e_i, e_i) = d_i`, with
/// `e_i² = −d_i` and anticommuting distinct generators.
pub fn clifford_algebra(diagonal: &[Scalar]) -> Result<Algebra> {
    if let Some(i) = diagonal.iter().position(Scalar::is_zero) {
        return Err(Error::Validation(format!(
            "degenerate form: diagonal entry {} is zero",
            i + 1
        )));
    }
    let m = diagonal.len();
    let subsets = clifford_subsets(m);
    let n = subsets.len();
    let index = |s: &[usize]| subsets.iter().position(|t| t == s).expect("subset");
    let mut constants = vec![Scalar::zero(); n * n * n];
    for (i, s) in subsets.iter().enumerate() {
        for (j, t) in subsets.iter().enumerate() {
            let swaps: usize = t.iter().map(|x| s.iter().filter(|y| *y > x).count()).sum();
            let mut coeff = if swaps.is_multiple_of(2) {
                Scalar::one()
            } else {
                -Scalar::one()
            };
            for x in s.iter().filter(|x| t.contains(x)) {
                coeff = coeff * -&diagonal[*x];
            }
            let sym: Vec<usize> = (0..m)
                .filter(|x| s.contains(x) != t.contains(x))
                .collect();
            constants[(i * n + j) * n + index(&sym)] = coeff;
        }
    }
    Ok(Algebra::build(
        n,
        constants,
        unit_vec(n, 0),
        Family::Clifford(diagonal.to_vec()),
    ))
}

/// `𝕜[x]/(x^N)` on the monomial basis.
pub fn truncated_polynomial(n: usize) -> Result<Algebra> {
    if n == 0 {
        return Err(Error::Validation("truncation degree must be at least 1".into()));
    }
    let mut constants = vec![Scalar::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n - i {
            constants[(i * n + j) * n + i + j] = Scalar::one();
        }
    }
    Ok(Algebra::build(
        n,
        constants,
        unit_vec(n, 0),
        Family::TruncatedPolynomial(n),
    ))
}

/// `k × k` matrices on the elementary basis, `E_ab` at index `a k + b`.
pub fn matrix_algebra(k: usize) -> Result<Algebra> {
    if k == 0 {
        return Err(Error::Validation("matrix size must be at least 1".into()));
    }
    let n = k * k;
    let mut constants = vec![Scalar::zero(); n * n * n];
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                constants[((a * k + b) * n + b * k + c) * n + a * k + c] = Scalar::one();
            }
        }
    }
    let mut unit = vec![Scalar::zero(); n];
    for a in 0..k {
        unit[a * k + a] = Scalar::one();
    }
    Ok(Algebra::build(n, constants, unit, Family::Matrix(k)))
}

pub fn opposite(a: &Algebra) -> Algebra {
    let n = a.dim;
    let mut constants = vec![Scalar::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                constants[(i * n + j) * n + k] = a.constant(j, i, k).clone();
            }
        }
    }
    let family = if a.is_commutative() {
        a.family.clone()
    } else {
        Family::Generic
    };
    Algebra::build(n, constants, a.unit.clone(), family)
}
