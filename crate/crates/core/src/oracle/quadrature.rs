//! Matrix elements of `cos²β` by direct integration over the sphere.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::racah::racah_3j_naive;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    // (P_n(z), P_{n−1}(z))
    let legendre = |z: f64| {
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        (p1, p0)
    };
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, q) = legendre(z);
            let dz = p / (n as f64 * (z * p - q) / (z * z - 1.0));
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (p, q) = legendre(z);
        let dp = n as f64 * (z * p - q) / (z * z - 1.0);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// `Y_l^m(θ, φ)` with the Condon–Shortley phase, from `x = cos θ`.
pub fn spherical_harmonic(l: i32, m: i32, x: f64, phi: f64) -> Complex64 {
    let am = m.abs();
    if am > l {
        return Complex64::new(0.0, 0.0);
    }
    // Associated Legendre P_l^{|m|}(x) including (−1)^m.
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 1..=am {
        pmm *= -((2 * k - 1) as f64) * s;
    }
    let plm = if l == am {
        pmm
    } else {
        let mut p0 = pmm;
        let mut p1 = x * (2 * am + 1) as f64 * pmm;
        for ll in (am + 2)..=l {
            let p2 = ((2 * ll - 1) as f64 * x * p1 - (ll + am - 1) as f64 * p0) / (ll - am) as f64;
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let ratio: f64 = ((l - am + 1)..=(l + am)).map(|k| 1.0 / k as f64).product();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt();
    let y = Complex64::from_polar(norm * plm, am as f64 * phi);
    if m >= 0 {
        y
    } else if am % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}

/// `⟨l',m'|cos²β|l,m⟩` with `cos β = sin θ cos(φ − χ)`, integrated numerically.
pub fn cos2beta_element_quadrature(lp: i32, mp: i32, l: i32, m: i32, chi: f64) -> Complex64 {
    let (xs, ws) = gauss_legendre((l + lp) as usize / 2 + 4);
    let nphi = 4 * (l + lp + 4) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in xs.iter().zip(&ws) {
        for k in 0..nphi {
            let phi = 2.0 * PI * k as f64 / nphi as f64;
            let c = (1.0 - x * x) * (phi - chi).cos().powi(2);
            acc += spherical_harmonic(lp, mp, *x, phi).conj()
                * c
                * spherical_harmonic(l, m, *x, phi)
                * *w;
        }
    }
    acc * (2.0 * PI / nphi as f64)
}

/// `⟨J',N',M'|cos²β|J,N,M⟩` for `S = 1` by expanding both states in the
/// uncoupled `|N m_N⟩|S m_S⟩` basis.
pub fn caseb_element_product_basis(
    jp: i32,
    np: i32,
    mp: i32,
    j: i32,
    n: i32,
    m: i32,
    chi: f64,
) -> Complex64 {
    // ⟨N m_N, 1 m_S | J M⟩
    let cg = |nn: i32, mn: i32, ms: i32, jj: i32, mm: i32| -> f64 {
        let phase = if (nn - 1 + mm).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        phase
            * f64::from(2 * jj + 1).sqrt()
            * racah_3j_naive([2 * nn, 2, 2 * jj, 2 * mn, 2 * ms, -2 * mm])
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for ms in -1..=1 {
        let (mn, mnp) = (m - ms, mp - ms);
        if mn.abs() > n || mnp.abs() > np {
            continue;
        }
        let a = cg(n, mn, ms, j, m);
        let b = cg(np, mnp, ms, jp, mp);
        if a == 0.0 || b == 0.0 {
            continue;
        }
        acc += cos2beta_element_quadrature(np, mnp, n, mn, chi) * (a * b);
    }
    acc
}
