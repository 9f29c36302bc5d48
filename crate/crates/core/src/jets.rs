//! Differential relations `Nⁿ(E) ⊆ A ⊗ E` and skeletal jet modules.

use std::sync::{Arc, OnceLock};

use crate::bimodule::{tensor_a, tensor_a_map, tor1, Bimodule, TensorA};
use crate::calculus::{Calculus, Exterior2};
use crate::error::{Error, Result};
use crate::exactla::{
    image, intersect, kernel, kron_vec, quotient, unit_vec, vec_is_zero, Mat, QuotientData,
    Scalar, Solver, Subspace,
};

/// `A ⊗ E` as a left module through the first factor.
pub fn free_tensor(e: &Bimodule) -> Result<Bimodule> {
    let a = e.algebra();
    let id = Mat::identity(e.dim());
    Ok(Bimodule::new_unchecked(
        a.clone(),
        a.dim() * e.dim(),
        Some(a.left_muls().iter().map(|l| l.kron(&id)).collect()),
        None,
    ))
}

/// The action map `A ⊗ E → E`.
pub fn action_map(e: &Bimodule) -> Result<Mat> {
    let left = e.left()?;
    let n = e.algebra().dim();
    let de = e.dim();
    Ok(Mat::from_fn(de, n * de, |f, c| left[c / de].get(f, c % de).clone()))
}

#[derive(Debug)]
pub struct RelationTower {
    calculus: Arc<Calculus>,
    module: Arc<Bimodule>,
    ae: Bimodule,
    n0: Subspace,
    n1: Subspace,
    n2: Subspace,
    /// `χ : N_d ⊗ E → A ⊗ E`, `(a ⊗ b) ⊗ e ↦ a ⊗ be`.
    chi: Mat,
    /// `ψ : N_d ⊗ E → Ω¹ ⊗_A Ω¹ ⊗_A E`, `(a ⊗ b) ⊗ e ↦ da ⊗ db ⊗ e`.
    psi: Mat,
    tor_ok: bool,
    tor1_dim: Option<usize>,
    t2e: OnceLock<Result<TensorA>>,
}

impl RelationTower {
    pub fn calculus(&self) -> &Arc<Calculus> {
        &self.calculus
    }

    pub fn module(&self) -> &Arc<Bimodule> {
        &self.module
    }

    /// `A ⊗ E` as a left module.
    pub fn free_tensor(&self) -> &Bimodule {
        &self.ae
    }

    pub fn n0(&self) -> &Subspace {
        &self.n0
    }

    pub fn n1(&self) -> &Subspace {
        &self.n1
    }

    /// Only meaningful when `tor_ok`.
    pub fn n2(&self) -> &Subspace {
        &self.n2
    }

    pub fn tor_ok(&self) -> bool {
        self.tor_ok
    }

    /// `dim Tor₁^A(Ω¹, E)` when it was computed (non-universal calculi).
    pub fn tor1_dim(&self) -> Option<usize> {
        self.tor1_dim
    }

    pub fn chi(&self) -> &Mat {
        &self.chi
    }

    pub fn psi(&self) -> &Mat {
        &self.psi
    }

    /// `Nⁿ(E)`.
    pub fn relations(&self, n: usize) -> Result<&Subspace> {
        match n {
            0 => Ok(&self.n0),
            1 => Ok(&self.n1),
            2 => {
                self.require_tor_ok()?;
                Ok(&self.n2)
            }
            _ if self.calculus.is_universal() => Ok(&self.n2),
            _ => Err(order_window_error(n)),
        }
    }

    pub fn require_tor_ok(&self) -> Result<()> {
        if self.tor_ok {
            Ok(())
        } else {
            Err(Error::Precondition(
                "second-order relations are not well defined on this module: \
                 prolonged relations do not descend through the tensor product"
                    .into(),
            ))
        }
    }

    /// `Ω¹ ⊗_A Ω¹ ⊗_A E`.
    pub fn t2e(&self) -> Result<&TensorA> {
        self.t2e
            .get_or_init(|| tensor_a(&self.calculus.t2().module, &self.module))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `S²_min(E) = im ψ ⊆ Ω¹ ⊗_A Ω¹ ⊗_A E`.
    pub fn s2_min_e(&self) -> Result<Subspace> {
        let dim = self.t2e()?.dim();
        if self.calculus.is_universal() {
            return Ok(Subspace::zero(dim));
        }
        Ok(image(&self.psi))
    }

    /// `S²(E) = ker(∧ ⊗_A id_E)`.
    pub fn s2_e(&self, x: &Exterior2) -> Result<Subspace> {
        let t2e = self.t2e()?;
        let o2e = tensor_a(x.omega2(), &self.module)?;
        let m = tensor_a_map(x.wedge(), &Mat::identity(self.module.dim()), t2e, &o2e);
        Ok(kernel(&m))
    }
}

fn order_window_error(n: usize) -> Error {
    Error::Precondition(format!(
        "order {n} relations on a non-universal calculus need the holonomic {n}-jet \
         construction, which is not available; orders up to 2 are supported"
    ))
}

/// The relation tower `N²(E) ⊆ N¹(E) ⊆ N⁰(E) ⊆ A ⊗ E`.
pub fn relation_tower(c: &Arc<Calculus>, e: &Arc<Bimodule>) -> Result<RelationTower> {
    let a = c.algebra();
    let n = a.dim();
    let de = e.dim();
    let left = e.left()?;
    let ae = free_tensor(e)?;
    let n0 = kernel(&action_map(e)?);
    let amb = n * de;
    let t2e = OnceLock::new();
    if c.is_universal() {
        return Ok(RelationTower {
            calculus: c.clone(),
            module: e.clone(),
            ae,
            n0,
            n1: Subspace::zero(amb),
            n2: Subspace::zero(amb),
            chi: Mat::zeros(amb, 0),
            psi: Mat::zeros(0, 0),
            tor_ok: true,
            tor1_dim: None,
            t2e,
        });
    }
    let nd = c.n_d();
    let k = nd.dim();
    let mut chi_cols = Vec::with_capacity(k * de);
    for w in nd.vectors() {
        for ei in 0..de {
            let mut col = vec![Scalar::zero(); amb];
            for (idx, coeff) in w.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let (ai, bi) = (idx / n, idx % n);
                for (f, x) in left[bi].col(ei).iter().enumerate() {
                    if !x.is_zero() {
                        col[ai * de + f].add_mul(coeff, x);
                    }
                }
            }
            chi_cols.push(col);
        }
    }
    let chi = Mat::from_columns(amb, &chi_cols);
    let t2e_val = tensor_a(&c.t2().module, e)?;
    let phi = c.phi();
    let mut psi_cols = Vec::with_capacity(k * de);
    for w in nd.vectors() {
        let pw = phi.mul_vec(&w);
        for ei in 0..de {
            psi_cols.push(t2e_val.class_of(&pw, &unit_vec(de, ei)));
        }
    }
    let psi = Mat::from_columns(t2e_val.dim(), &psi_cols);
    let _ = t2e.set(Ok(t2e_val));
    let n1 = image(&chi);
    let ker_chi = kernel(&chi);
    let tor_ok = ker_chi.vectors().iter().all(|v| vec_is_zero(&psi.mul_vec(v)));
    let ker_psi = kernel(&psi);
    let n2 = ker_psi.map(&chi)?;
    let omega1_right = c.omega1().forget_left();
    let tor1_dim = Some(tor1(&omega1_right, e)?);
    let tower = RelationTower {
        calculus: c.clone(),
        module: e.clone(),
        ae,
        n0,
        n1,
        n2,
        chi,
        psi,
        tor_ok,
        tor1_dim,
        t2e,
    };
    if tower.tor1_dim == Some(0) && !tower.tor_ok {
        return Err(Error::Consistency(
            "Tor₁ vanishes but prolonged relations fail to descend".into(),
        ));
    }
    Ok(tower)
}

#[derive(Clone, Debug)]
pub struct SkeletalJet {
    order: usize,
    module: Bimodule,
    p_hat: QuotientData,
    prolong: Mat,
    proj_down: Option<Mat>,
    symmetric: Subspace,
}

impl SkeletalJet {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn module(&self) -> &Bimodule {
        &self.module
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// `p̂ : A ⊗ E → 𝕁ⁿE`.
    pub fn p_hat(&self) -> &QuotientData {
        &self.p_hat
    }

    /// `e ↦ p̂(1 ⊗ e)`.
    pub fn prolong(&self) -> &Mat {
        &self.prolong
    }

    /// `𝕁ⁿE → 𝕁ⁿ⁻¹E`, absent at order 0.
    pub fn proj_down(&self) -> Option<&Mat> {
        self.proj_down.as_ref()
    }

    /// `𝕊ⁿ = p̂(Nⁿ⁻¹) ⊆ 𝕁ⁿE`; at order 0 this is the whole space.
    pub fn symmetric(&self) -> &Subspace {
        &self.symmetric
    }
}

/// `𝕁ⁿE = (A ⊗ E)/Nⁿ(E)`.
pub fn skeletal_jet(t: &RelationTower, n: usize) -> Result<SkeletalJet> {
    let rel = t.relations(n)?;
    let (module, p_hat) = t.ae.quotient_by(rel)?;
    let de = t.module.dim();
    let one = t.calculus.algebra().unit();
    let prolong_cols: Vec<Vec<Scalar>> = (0..de)
        .map(|e| p_hat.project(&kron_vec(one, &unit_vec(de, e))))
        .collect();
    let prolong = Mat::from_columns(p_hat.dim(), &prolong_cols);
    let (proj_down, symmetric) = if n == 0 {
        (None, Subspace::full(p_hat.dim()))
    } else {
        let below = quotient(rel.ambient_dim(), t.relations(n - 1)?)?;
        let down = &below.projection * &p_hat.section;
        let sym = t.relations(n - 1)?.map(&p_hat.projection)?;
        (Some(down), sym)
    };
    Ok(SkeletalJet {
        order: n,
        module,
        p_hat,
        prolong,
        proj_down,
        symmetric,
    })
}

/// `𝕊ⁿ = Nⁿ⁻¹/Nⁿ` together with, for `n = 2`, the isomorphism onto
/// `S²_min(E)` sending `[Σ a ⊗ be]` to `−Σ da ⊗ db ⊗ e`.
#[derive(Clone, Debug)]
pub struct SymmetricForms {
    pub order: usize,
    pub module: Bimodule,
    /// `Nⁿ⁻¹ → 𝕊ⁿ` in `Nⁿ⁻¹` coordinates.
    pub quotient: QuotientData,
    /// Columns: images of the basis of `𝕊²` in `Ω¹ ⊗_A Ω¹ ⊗_A E`.
    pub iso: Option<Mat>,
}

pub fn skeletal_symmetric_forms(t: &RelationTower, n: usize) -> Result<SymmetricForms> {
    if n == 0 {
        return Err(Error::Precondition("symmetric forms start at order 1".into()));
    }
    let upper = t.relations(n - 1)?;
    let lower = t.relations(n)?;
    let upper_mod = t.ae.restrict(upper)?;
    let lower_coords = Subspace::span(
        upper.dim(),
        lower
            .vectors()
            .iter()
            .map(|v| upper.coords(v).expect("relation chain is nested")),
    );
    let (module, q) = upper_mod.quotient_by(&lower_coords)?;
    let iso = if n == 2 {
        let t2e_dim = t.t2e()?.dim();
        if t.calculus.is_universal() {
            Some(Mat::zeros(t2e_dim, 0))
        } else {
            let solver = Solver::new(&t.chi);
            let cols: Result<Vec<Vec<Scalar>>> = (0..q.dim())
                .map(|k| {
                    let rep = upper.combine(&q.lift(&unit_vec(q.dim(), k)));
                    let w = solver.solve(&rep).ok_or_else(|| {
                        Error::Consistency("first-order relation outside the image of χ".into())
                    })?;
                    Ok(t.psi.mul_vec(&w).iter().map(|x| -x).collect())
                })
                .collect();
            Some(Mat::from_columns(t2e_dim, &cols?))
        }
    } else {
        None
    };
    Ok(SymmetricForms {
        order: n,
        module,
        quotient: q,
        iso,
    })
}

/// `dim S²(E) − dim S²_min(E)`.
pub fn representability_defect(t: &RelationTower, x: &Exterior2) -> Result<usize> {
    t.require_tor_ok()?;
    let s2 = t.s2_e(x)?;
    let s2_min = t.s2_min_e()?;
    if !s2.contains_subspace(&s2_min) {
        return Err(Error::Consistency(
            "minimal symmetric forms are not contained in the kernel of the wedge".into(),
        ));
    }
    Ok(s2.dim() - s2_min.dim())
}

/// Whether `1 ⊗ E ∩ Nⁿ(E) = 0`, i.e. the prolongation is injective.
pub fn prolong_is_injective(t: &RelationTower, n: usize) -> Result<bool> {
    let de = t.module.dim();
    let one = t.calculus.algebra().unit();
    let ones = Subspace::span(
        t.ae.dim(),
        (0..de).map(|e| kron_vec(one, &unit_vec(de, e))),
    );
    Ok(intersect(&ones, t.relations(n)?)?.is_zero())
}
