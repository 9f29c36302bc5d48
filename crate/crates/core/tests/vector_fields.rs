use std::sync::Arc;

use ncjet_core::algebra::{cyclic_table, group_algebra, truncated_polynomial};
use ncjet_core::calculus::{
    calculus_from_relations, kahler_commutators, maximal_prolongation, universal_calculus,
    zero_exterior2, Calculus,
};
use ncjet_core::exactla::{Mat, Scalar};
use ncjet_core::fixtures::fixture;
use ncjet_core::vectorfields::{
    asym, bracket, bracket_table, custom_projector, is_zero, leibniz_check, orthogonal_projector,
    skew_projector, vector_fields, VectorFieldSpace,
};

fn kahler(n: usize) -> Arc<Calculus> {
    let a = Arc::new(truncated_polynomial(n).unwrap());
    Arc::new(calculus_from_relations(&a, &kahler_commutators(&a)).unwrap())
}

fn universal_z2() -> Arc<Calculus> {
    let a = Arc::new(group_algebra(&cyclic_table(2)).unwrap());
    Arc::new(universal_calculus(&a).unwrap())
}

/// `x^{shift} ∂`.
fn monomial_field(n: usize, shift: usize) -> Mat {
    Mat::from_fn(n, n, |r, k| {
        if k >= 1 && k - 1 + shift == r {
            Scalar::from_int(k as i64)
        } else {
            Scalar::zero()
        }
    })
}

fn unit_tensor(m: usize, k: usize, l: usize) -> Vec<Scalar> {
    let mut xi = vec![Scalar::zero(); m * m];
    xi[k * m + l] = Scalar::one();
    xi
}

/// `Σ a_k X_k ⊗ Σ b_l X_l` in `𝔛 ⊗ 𝔛`.
fn outer(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

fn sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[test]
fn pairing_with_zero_vanishes() {
    for c in [kahler(3), universal_z2()] {
        let v = vector_fields(&c).unwrap();
        let t2 = c.t2().dim();
        let xx = v.xx().unwrap().dim();
        let zero_form = vec![Scalar::zero(); t2];
        let zero_tensor = vec![Scalar::zero(); xx];
        for u in 0..xx {
            let mut eta = zero_tensor.clone();
            eta[u] = Scalar::one();
            assert!(is_zero(&v.pairing2(&zero_form, &eta).unwrap()));
        }
        for s in 0..t2 {
            let mut xi = zero_form.clone();
            xi[s] = Scalar::one();
            assert!(is_zero(&v.pairing2(&xi, &zero_tensor).unwrap()));
        }
        let zero_field = Mat::zeros(c.algebra().dim(), c.algebra().dim());
        for w in 0..c.dim_omega1() {
            let omega = c.d().col(w);
            assert!(is_zero(&v.interior(&omega, &zero_field).unwrap()));
        }
    }
}

#[test]
fn universal_pairing_matches_operator_formula() {
    // ⟨⟨dg ⊗ dh, X ⊗ Y⟩⟩ = Y(g·X(h)) − g·Y(X(h))
    let c = universal_z2();
    let a = c.algebra();
    let v = vector_fields(&c).unwrap();
    let m = v.dim();
    let xx = v.xx().unwrap();
    for g in 0..a.dim() {
        for h in 0..a.dim() {
            let xi = c.t2().class_of(&c.d().col(g), &c.d().col(h));
            for k in 0..m {
                for l in 0..m {
                    let (x, y) = (&v.fields()[k], &v.fields()[l]);
                    let xh = x.mul_vec(&a.basis(h));
                    let expected = sub(
                        &y.mul_vec(&a.mul(&a.basis(g), &xh)),
                        &a.mul(&a.basis(g), &y.mul_vec(&xh)),
                    );
                    let eta = xx.project(&unit_tensor(m, k, l));
                    assert_eq!(
                        v.pairing2(&xi, &eta).unwrap(),
                        expected,
                        "g={g} h={h} k={k} l={l}"
                    );
                }
            }
        }
    }
}

#[test]
fn kahler_pairing_is_a_product_of_derivatives() {
    // ⟨⟨dx ⊗ x dx, X ⊗ Y⟩⟩ = X(x) · x · Y(x) when A is commutative
    let c = kahler(5);
    let a = c.algebra();
    let v = vector_fields(&c).unwrap();
    let m = v.dim();
    let xx = v.xx().unwrap();
    let x = a.basis(1);
    let dx = c.d().col(1);
    let x_dx = c.omega1().left_by(&x).unwrap().mul_vec(&dx);
    let xi = c.t2().class_of(&dx, &x_dx);
    for k in 0..m {
        for l in 0..m {
            let xk = v.fields()[k].mul_vec(&x);
            let yl = v.fields()[l].mul_vec(&x);
            let expected = a.mul(&a.mul(&xk, &x), &yl);
            let eta = xx.project(&unit_tensor(m, k, l));
            assert_eq!(v.pairing2(&xi, &eta).unwrap(), expected);
        }
    }
}

#[test]
fn universal_annihilator_is_everything() {
    let c = universal_z2();
    let v = vector_fields(&c).unwrap();
    let x2 = maximal_prolongation(&c).unwrap();
    assert!(x2.s2().is_zero());
    let ad = asym(&v, &x2).unwrap();
    assert_eq!(ad.ann.dim(), v.xx().unwrap().dim());
    assert_eq!(ad.asym.dim(), v.dim() * v.dim());
    assert!(ad.maximal);
}

#[test]
fn zero_exterior_annihilator_kills_all_symmetric_forms() {
    let c = kahler(3);
    let v = vector_fields(&c).unwrap();
    let x2 = zero_exterior2(&c).unwrap();
    let ad = asym(&v, &x2).unwrap();
    for eta in ad.ann.vectors() {
        for sigma in x2.s2().vectors() {
            assert!(is_zero(&v.pairing2(&sigma, &eta).unwrap()));
        }
    }
    let full = asym(&v, &maximal_prolongation(&c).unwrap()).unwrap();
    assert!(ad.ann.vectors().iter().all(|eta| full.ann.contains(eta)));
}

#[test]
fn antisymmetric_tensors_and_composition() {
    let c = kahler(3);
    let v = vector_fields(&c).unwrap();
    let xd = monomial_field(3, 1);
    let x2d = monomial_field(3, 2);
    let (p, q) = (v.coords(&xd).unwrap(), v.coords(&x2d).unwrap());
    let xi = sub(&outer(&p, &q), &outer(&q, &p));
    let ad = asym(&v, &maximal_prolongation(&c).unwrap()).unwrap();
    assert!(ad.asym.contains(&xi));
    assert!(!ad.asym.contains(&outer(&p, &p)));

    // c(X ⊗ Y) = Y ∘ X
    assert_eq!(v.compose_c(&outer(&p, &q)), &x2d * &xd);
    // x²∂ ∘ x∂ − x∂ ∘ x²∂ = −x²∂
    assert_eq!(v.compose_c(&xi), x2d.scale(&Scalar::from_int(-1)));
}

#[test]
fn composites_of_antisymmetric_tensors_are_fields() {
    let c = universal_z2();
    let v = vector_fields(&c).unwrap();
    let ad = asym(&v, &maximal_prolongation(&c).unwrap()).unwrap();
    for xi in ad.asym.vectors() {
        assert!(v.contains(&v.compose_c(&xi)));
    }
    let gram = Mat::identity(2);
    let p = orthogonal_projector(&v, &ad, &gram).unwrap();
    p.validate(&ad).unwrap();
    for x in 0..v.dim() {
        let b = bracket(&v, x, x, &p);
        assert!(b.coords.is_some(), "[X,X] is a field");
    }
    for row in bracket_table(&v, &p) {
        for b in row {
            assert!(b.coords.is_some());
        }
    }
}

#[test]
fn projector_shortcuts() {
    let c = kahler(3);
    let v = vector_fields(&c).unwrap();
    let m = v.dim();
    let ad = asym(&v, &maximal_prolongation(&c).unwrap()).unwrap();

    let zero = custom_projector(Mat::zeros(m * m, m * m));
    zero.validate(&ad).unwrap();
    for row in bracket_table(&v, &zero) {
        for b in row {
            assert!(b.value.is_zero());
        }
    }

    // with ℘ = id the bracket is plain composition X ∘ Y
    let id = custom_projector(Mat::identity(m * m));
    for x in 0..m {
        for y in 0..m {
            let b = bracket(&v, x, y, &id);
            assert_eq!(b.value, &v.fields()[x] * &v.fields()[y]);
        }
    }
    assert!(id.validate(&ad).is_err());

    // skew: [X, Y] = X∘Y − Y∘X
    let skew = skew_projector(&v);
    for x in 0..m {
        for y in 0..m {
            let (fx, fy) = (&v.fields()[x], &v.fields()[y]);
            assert_eq!(bracket(&v, x, y, &skew).value, &(fx * fy) - &(fy * fx));
        }
    }
}

#[test]
fn leibniz_rule_on_fixtures() {
    for name in ["z2", "z3", "clifford1", "trunc3", "trunc4"] {
        let f = fixture(name).unwrap();
        let v: VectorFieldSpace = vector_fields(&f.calculus).unwrap();
        let rep = leibniz_check(&v).unwrap();
        assert!(rep.passed(), "{name}: {rep:?}");
        assert!(rep.checked > 0 || v.dim() == 0, "{name}");
    }
}
