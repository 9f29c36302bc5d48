//! First-order differential calculi as quotients of the universal one,
//! and their degree-2 exterior components.

use std::sync::Arc;

use crate::algebra::Algebra;
use crate::bimodule::{
    regular_bimodule, sub_bimodule_generated, tensor_a, tensor_k, Bimodule, TensorA,
};
use crate::error::{Error, Result};
use crate::exactla::{
    image, kernel, kron_vec, vec_add, vec_is_zero, vec_sub, Mat, QuotientData, Scalar, Subspace,
};

#[derive(Clone, Debug)]
pub struct Calculus {
    algebra: Arc<Algebra>,
    /// `A ⊗ A` with the outer actions.
    aa: Bimodule,
    omega_u: Subspace,
    /// Relations inside `A ⊗ A`.
    n_d: Subspace,
    /// Relations in the coordinates of `Ω_u¹`.
    n_d_u: Subspace,
    quotient: QuotientData,
    omega1: Arc<Bimodule>,
    d: Mat,
    rho: Mat,
    universal: bool,
    t2: TensorA,
    phi: Mat,
    s2_min: Subspace,
}

impl Calculus {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn tensor_square(&self) -> &Bimodule {
        &self.aa
    }

    /// `Ω_u¹ ⊆ A ⊗ A`.
    pub fn omega_u(&self) -> &Subspace {
        &self.omega_u
    }

    /// The defining relations `N_d ⊆ Ω_u¹ ⊆ A ⊗ A`.
    pub fn n_d(&self) -> &Subspace {
        &self.n_d
    }

    pub fn is_universal(&self) -> bool {
        self.universal
    }

    pub fn omega1(&self) -> &Arc<Bimodule> {
        &self.omega1
    }

    pub fn dim_omega1(&self) -> usize {
        self.omega1.dim()
    }

    /// `d : A → Ω¹`.
    pub fn d(&self) -> &Mat {
        &self.d
    }

    /// `ρ : A ⊗ A → Ω¹`, `a ⊗ b ↦ a·db`. Surjective; its restriction to
    /// `Ω_u¹` is the defining quotient map.
    pub fn rho(&self) -> &Mat {
        &self.rho
    }

    /// The quotient `Ω_u¹ → Ω¹` in `Ω_u¹` coordinates.
    pub fn quotient(&self) -> &QuotientData {
        &self.quotient
    }

    pub fn kernel_d(&self) -> Subspace {
        kernel(&self.d)
    }

    /// `Ω¹ ⊗_A Ω¹`.
    pub fn t2(&self) -> &TensorA {
        &self.t2
    }

    /// `φ : A ⊗ A → Ω¹ ⊗_A Ω¹`, `a ⊗ b ↦ da ⊗_A db`.
    pub fn phi(&self) -> &Mat {
        &self.phi
    }

    /// Image of `N_d` under `φ`.
    pub fn s2_min(&self) -> &Subspace {
        &self.s2_min
    }

    /// The universal projection `A ⊗ A → Ω_u¹ ⊆ A ⊗ A`, `a ⊗ b ↦ a ⊗ b − ab ⊗ 1`.
    pub fn universal_rho(a: &Algebra) -> Mat {
        let n = a.dim();
        let cols: Vec<Vec<Scalar>> = (0..n * n)
            .map(|c| {
                let (i, j) = (c / n, c % n);
                let mut v = vec![Scalar::zero(); n * n];
                v[c] = Scalar::one();
                vec_sub(&v, &kron_vec(&a.basis_product(i, j), a.unit()))
            })
            .collect();
        Mat::from_columns(n * n, &cols)
    }

    /// `d_u(a) = 1 ⊗ a − a ⊗ 1` in `A ⊗ A` coordinates.
    pub fn d_universal(a: &Algebra, x: &[Scalar]) -> Vec<Scalar> {
        vec_sub(&kron_vec(a.unit(), x), &kron_vec(x, a.unit()))
    }

    /// Checks the calculus axioms exactly.
    pub fn validate(&self) -> Result<()> {
        let a = &self.algebra;
        let n = a.dim();
        self.omega1.validate()?;
        for i in 0..n {
            let di = self.d.col(i);
            for j in 0..n {
                let dj = self.d.col(j);
                let lhs = self.d.mul_vec(&a.basis_product(i, j));
                let rhs = vec_add(
                    &self.omega1.left()?[i].mul_vec(&dj),
                    &self.omega1.right()?[j].mul_vec(&di),
                );
                if lhs != rhs {
                    return Err(Error::Validation(format!(
                        "Leibniz rule fails on the basis pair ({i}, {j})"
                    )));
                }
            }
        }
        if self.rho.rank() != self.omega1.dim() {
            return Err(Error::Validation(
                "the first-order forms are not generated by the differential".into(),
            ));
        }
        for i in 0..n {
            let du = Self::d_universal(a, &a.basis(i));
            let coords = self.omega_u.coords(&du).ok_or_else(|| {
                Error::Consistency("universal differential leaves the kernel of multiplication".into())
            })?;
            if self.quotient.project(&coords) != self.d.col(i) {
                return Err(Error::Validation(format!(
                    "d(e{i}) differs from the class of its universal differential"
                )));
            }
        }
        if !self.omega_u.contains_subspace(&self.n_d)
            || sub_bimodule_generated(&self.aa, &self.n_d.vectors()) != self.n_d
        {
            return Err(Error::Validation(
                "relations do not form a sub-bimodule of the universal forms".into(),
            ));
        }
        if kernel(&self.quotient.projection) != self.n_d_u {
            return Err(Error::Consistency("quotient kernel differs from the relations".into()));
        }
        Ok(())
    }
}

/// Multiplication `A ⊗ A → A`.
pub fn multiplication_map(a: &Algebra) -> Mat {
    let n = a.dim();
    let cols: Vec<Vec<Scalar>> = (0..n * n).map(|c| a.basis_product(c / n, c % n)).collect();
    Mat::from_columns(n, &cols)
}

pub fn universal_calculus(a: &Arc<Algebra>) -> Result<Calculus> {
    let n = a.dim();
    build(a, Subspace::zero(n * n))
}

/// The quotient of the universal calculus by the sub-bimodule generated by
/// `gens ⊆ A ⊗ A`.
pub fn calculus_from_relations(a: &Arc<Algebra>, gens: &[Vec<Scalar>]) -> Result<Calculus> {
    let n = a.dim();
    let mu = multiplication_map(a);
    for (k, g) in gens.iter().enumerate() {
        if g.len() != n * n {
            return Err(Error::Validation(format!(
                "relation {k} has {} coordinates, expected {}",
                g.len(),
                n * n
            )));
        }
        if !vec_is_zero(&mu.mul_vec(g)) {
            return Err(Error::Validation(format!(
                "relation {k} is not in the kernel of multiplication"
            )));
        }
    }
    let aa = outer_square(a);
    let n_d = sub_bimodule_generated(&aa, gens);
    build(a, n_d)
}

/// The commutators `[d_u e_i, e_j] = 1⊗e_ie_j − e_i⊗e_j − e_j⊗e_i + e_je_i⊗1`
/// for all basis pairs.
pub fn kahler_commutators(a: &Algebra) -> Vec<Vec<Scalar>> {
    let n = a.dim();
    let one = a.unit();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (ei, ej) = (a.basis(i), a.basis(j));
            let plus = vec_add(
                &kron_vec(one, &a.basis_product(i, j)),
                &kron_vec(&a.basis_product(j, i), one),
            );
            let minus = vec_add(&kron_vec(&ei, &ej), &kron_vec(&ej, &ei));
            let c = vec_sub(&plus, &minus);
            if !vec_is_zero(&c) {
                out.push(c);
            }
        }
    }
    out
}

/// Converts a directly given `(Ω¹, d)` into the quotient presentation,
/// with `N_d` the kernel of `a ⊗ b ↦ a·db` on `Ω_u¹`.
pub fn calculus_from_differential(a: &Arc<Algebra>, omega1: &Bimodule, d: &Mat) -> Result<Calculus> {
    let n = a.dim();
    if d.shape() != (omega1.dim(), n) {
        return Err(Error::Dimension(format!(
            "differential has shape {:?}, expected {}x{n}",
            d.shape(),
            omega1.dim()
        )));
    }
    let left = omega1.left()?;
    let cols: Vec<Vec<Scalar>> = (0..n * n)
        .map(|c| left[c / n].mul_vec(&d.col(c % n)))
        .collect();
    let m = Mat::from_columns(omega1.dim(), &cols);
    if m.rank() != omega1.dim() {
        return Err(Error::Validation(
            "the given forms are not generated by the differential".into(),
        ));
    }
    let omega_u = kernel(&multiplication_map(a));
    let rel_coords = kernel(&(&m * &omega_u.inclusion()));
    let n_d = Subspace::span(n * n, rel_coords.vectors().iter().map(|c| omega_u.combine(c)));
    build(a, n_d)
}

fn outer_square(a: &Arc<Algebra>) -> Bimodule {
    let reg = regular_bimodule(a);
    tensor_k(&reg, &reg)
}

fn build(a: &Arc<Algebra>, n_d: Subspace) -> Result<Calculus> {
    let n = a.dim();
    let aa = outer_square(a);
    let omega_u = kernel(&multiplication_map(a));
    let omega_u_module = aa.restrict(&omega_u)?;
    let n_d_u = Subspace::span(
        omega_u.dim(),
        n_d.vectors().iter().map(|v| {
            omega_u
                .coords(v)
                .expect("relations lie in the universal forms")
        }),
    );
    let universal = n_d.is_zero();
    let (omega1, quotient) = omega_u_module.quotient_by(&n_d_u)?;
    let rho_u = Calculus::universal_rho(a);
    let rho_cols: Vec<Vec<Scalar>> = (0..n * n)
        .map(|c| {
            let coords = omega_u.coords(&rho_u.col(c)).expect("image of ρ lies in Ω_u¹");
            quotient.project(&coords)
        })
        .collect();
    let rho = Mat::from_columns(quotient.dim(), &rho_cols);
    let d_cols: Vec<Vec<Scalar>> = (0..n)
        .map(|b| rho.mul_vec(&kron_vec(a.unit(), &a.basis(b))))
        .collect();
    let d = Mat::from_columns(quotient.dim(), &d_cols);
    let omega1 = Arc::new(omega1);
    let t2 = tensor_a(&omega1, &omega1)?;
    let phi_cols: Vec<Vec<Scalar>> = (0..n * n)
        .map(|c| t2.class_of(&d.col(c / n), &d.col(c % n)))
        .collect();
    let phi = Mat::from_columns(t2.dim(), &phi_cols);
    let s2_min = if universal {
        Subspace::zero(t2.dim())
    } else {
        n_d.map(&phi)?
    };
    Ok(Calculus {
        algebra: a.clone(),
        aa,
        omega_u,
        n_d,
        n_d_u,
        quotient,
        omega1,
        d,
        rho,
        universal,
        t2,
        phi,
        s2_min,
    })
}

/// A degree-2 exterior component `Ω² = (Ω¹ ⊗_A Ω¹)/S²`.
#[derive(Clone, Debug)]
pub struct Exterior2 {
    calculus: Arc<Calculus>,
    s2: Subspace,
    omega2: Bimodule,
    wedge: QuotientData,
    is_maximal: bool,
}

impl Exterior2 {
    pub fn calculus(&self) -> &Arc<Calculus> {
        &self.calculus
    }

    pub fn omega2(&self) -> &Bimodule {
        &self.omega2
    }

    /// `∧ : Ω¹ ⊗_A Ω¹ → Ω²`.
    pub fn wedge(&self) -> &Mat {
        &self.wedge.projection
    }

    pub fn is_maximal(&self) -> bool {
        self.is_maximal
    }

    /// `S² = ker ∧`.
    pub fn s2(&self) -> &Subspace {
        &self.s2
    }

    pub fn validate(&self) -> Result<()> {
        let t2 = &self.calculus.t2.module;
        if self.wedge().rank() != self.omega2.dim() {
            return Err(Error::Consistency("wedge is not surjective".into()));
        }
        for (src, tgt) in [
            (t2.left()?, self.omega2.left()?),
            (t2.right()?, self.omega2.right()?),
        ] {
            for (x, y) in src.iter().zip(tgt) {
                if (self.wedge() * x) != (y * self.wedge()) {
                    return Err(Error::Consistency("wedge is not bilinear".into()));
                }
            }
        }
        if !self.s2.contains_subspace(self.calculus.s2_min()) {
            return Err(Error::Validation(
                "symmetric forms do not contain the prolonged relations".into(),
            ));
        }
        if kernel(self.wedge()) != self.s2 {
            return Err(Error::Consistency("kernel of wedge differs from S²".into()));
        }
        if self.is_maximal != (&self.s2 == self.calculus.s2_min()) {
            return Err(Error::Consistency("maximality flag is wrong".into()));
        }
        Ok(())
    }
}

/// `s2_min` of a calculus, as a free function for symmetry with `s2`.
pub fn s2_min(c: &Calculus) -> &Subspace {
    c.s2_min()
}

pub fn s2(x: &Exterior2) -> &Subspace {
    x.s2()
}

pub fn maximal_prolongation(c: &Arc<Calculus>) -> Result<Exterior2> {
    exterior2_from_extra_relations(c, &[])
}

/// `Ω² = (Ω¹ ⊗_A Ω¹)/(S²_min + ⟨extra⟩)`.
pub fn exterior2_from_extra_relations(c: &Arc<Calculus>, extra: &[Vec<Scalar>]) -> Result<Exterior2> {
    let t2 = &c.t2;
    for (k, v) in extra.iter().enumerate() {
        if v.len() != t2.dim() {
            return Err(Error::Validation(format!(
                "extra relation {k} has {} coordinates, expected {}",
                v.len(),
                t2.dim()
            )));
        }
    }
    let mut gens = c.s2_min.vectors();
    gens.extend(extra.iter().cloned());
    let s2 = sub_bimodule_generated(&t2.module, &gens);
    let is_maximal = &s2 == c.s2_min();
    let (omega2, wedge) = t2.module.quotient_by(&s2)?;
    Ok(Exterior2 {
        calculus: c.clone(),
        s2,
        omega2,
        wedge,
        is_maximal,
    })
}

/// `Ω² = 0`.
pub fn zero_exterior2(c: &Arc<Calculus>) -> Result<Exterior2> {
    let all = Subspace::full(c.t2.dim()).vectors();
    exterior2_from_extra_relations(c, &all)
}

/// Image of `A·dA·A`, which must be all of `Ω¹`.
pub fn generated_by_differential(c: &Calculus) -> bool {
    image(c.rho()).is_full()
}
