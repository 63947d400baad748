//! Integer-order Bessel functions of the first kind, real argument.

/// `J_l(x)` for any integer order and real argument.
///
/// Miller's backward recurrence, normalised with `J_0 + 2 sum_k J_2k = 1`.
pub fn bessel_j(l: i32, x: f64) -> f64 {
    let n = l.unsigned_abs() as usize;
    // J_{-l} = (-1)^l J_l and J_l(-x) = (-1)^l J_l(x)
    let sign = if n % 2 == 1 && ((l < 0) != (x < 0.0)) { -1.0 } else { 1.0 };
    sign * bessel_j_nonneg(n, x.abs())
}

fn bessel_j_nonneg(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let m0 = n.max(x.ceil() as usize);
    let mut start = m0 + (160.0 * m0 as f64).sqrt() as usize + 20;
    start += start % 2;
    let mut next = 0.0; // J_{j+1}
    let mut cur = 1e-300; // J_j
    let mut norm = 0.0;
    let mut wanted = if n == start { cur } else { 0.0 };
    for j in (1..=start).rev() {
        let prev = 2.0 * j as f64 / x * cur - next;
        next = cur;
        cur = prev;
        let k = j - 1;
        if k == n {
            wanted = cur;
        }
        if k > 0 && k % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += cur;
    wanted / norm
}
