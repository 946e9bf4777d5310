//! Quadrature rules and Bessel functions.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights mapped onto `[a, b]`, nodes ascending.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for (xi, wi) in x.iter_mut().zip(w.iter_mut()) {
        *xi = mid + half * *xi;
        *wi *= half;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let nf = n as f64;
    (p1, nf * (z * p1 - p0) / (z * z - 1.0))
}

/// `J_0(x) ..= J_max_order(x)` by Miller's backward recurrence, normalized
/// with `J_0 + 2 sum J_2k = 1`.
pub fn bessel_j_upto(max_order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = max_order.max(ax.ceil() as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut j_next = 0.0;
    let mut j_cur = 1e-300;
    let mut norm = 0.0;
    for m in (1..=start).rev() {
        let j_prev = 2.0 * m as f64 / ax * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let k = m - 1;
        if k <= max_order {
            out[k] = j_cur;
        }
        if k > 0 && k % 2 == 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += j_cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if x < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Bessel function of the first kind for any integer order.
pub fn bessel_j(order: i32, x: f64) -> f64 {
    let n = order.unsigned_abs() as usize;
    let v = bessel_j_upto(n, x)[n];
    if order < 0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}
