//! Golden-section search for a local minimum on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Minimize `f` on `[a, b]`, stopping when the bracket is narrower than
/// `tol`. The returned point is the best one evaluated, including the ends.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Minimum {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let fa = f(a);
    let fb = f(b);
    let mut best = if fb < fa { Minimum { x: b, value: fb } } else { Minimum { x: a, value: fa } };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a) > tol && iters < 200 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.value {
            best = Minimum { x, value: v };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = golden_section(|x| (x - 1.3) * (x - 1.3) + 2.0, -4.0, 5.0, 1e-10);
        // the value is flat to rounding within ~sqrt(eps) of the minimizer
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn minimum_at_bracket_end() {
        let m = golden_section(|x| x, 2.0, 3.0, 1e-10);
        assert_eq!(m.x, 2.0);
    }

    #[test]
    fn reversed_bracket() {
        let m = golden_section(|x: f64| x.cos(), 5.0, 1.0, 1e-10);
        assert!((m.x - std::f64::consts::PI).abs() < 1e-7);
    }
}
