//! Scalar real-root location and complex zero counting for secular functions.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sign-change interval produced by `bracket_scan`.
#[derive(Clone, Copy, Debug)]
pub struct Bracket {
    pub a: f64,
    pub b: f64,
    pub fa: f64,
    pub fb: f64,
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug)]
pub struct Rectangle {
    pub lower_left: Complex64,
    pub upper_right: Complex64,
}

impl Rectangle {
    pub fn new(lower_left: Complex64, upper_right: Complex64) -> Result<Self> {
        if upper_right.re <= lower_left.re || upper_right.im <= lower_left.im {
            return Err(Error::InvalidInput("degenerate rectangle".into()));
        }
        Ok(Self {
            lower_left,
            upper_right,
        })
    }

    pub fn center(&self) -> Complex64 {
        (self.lower_left + self.upper_right) / 2.0
    }

    pub fn width(&self) -> f64 {
        self.upper_right.re - self.lower_left.re
    }

    pub fn height(&self) -> f64 {
        self.upper_right.im - self.lower_left.im
    }
}

/// Scan f on a uniform grid and collect one bracket per sign change.
pub fn bracket_scan(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    n_samples: usize,
) -> Result<Vec<Bracket>> {
    if !(a < b) || n_samples < 2 {
        return Err(Error::InvalidInput(format!(
            "bracket_scan needs a < b and n_samples >= 2, got [{a}, {b}] with {n_samples}"
        )));
    }
    let h = (b - a) / (n_samples - 1) as f64;
    let mut brackets = Vec::new();
    let mut x_prev = a;
    let mut f_prev = f(a);
    if !f_prev.is_finite() {
        return Err(Error::NonFiniteSample);
    }
    for k in 1..n_samples {
        let x = a + k as f64 * h;
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NonFiniteSample);
        }
        if f_prev * fx < 0.0 {
            brackets.push(Bracket {
                a: x_prev,
                b: x,
                fa: f_prev,
                fb: fx,
            });
        } else if fx == 0.0 && f_prev != 0.0 {
            // exact hit; degenerate bracket centred on the sample
            brackets.push(Bracket {
                a: x,
                b: x,
                fa: 0.0,
                fb: 0.0,
            });
        }
        x_prev = x;
        f_prev = fx;
    }
    Ok(brackets)
}

/// Bisect a sign-change bracket down to xtol (default 1e-12 * (1 + |root|)).
pub fn bisect(f: &mut dyn FnMut(f64) -> f64, bracket: &Bracket, xtol: Option<f64>) -> Result<f64> {
    if bracket.a == bracket.b {
        return Ok(bracket.a);
    }
    let (mut a, mut b, mut fa) = (bracket.a, bracket.b, bracket.fa);
    if !(a < b) || bracket.fa * bracket.fb >= 0.0 {
        return Err(Error::InvalidInput("invalid bracket".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let tol = xtol.unwrap_or_else(|| 1e-12 * (1.0 + mid.abs()));
        if b - a <= tol {
            return Ok(mid);
        }
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(Error::LostBracket);
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

/// Count zeros (with multiplicity) inside a rectangle via the argument
/// principle. Phase increments are tracked along the boundary; samples are
/// doubled until every increment stays below pi/2.
pub fn winding_number(
    f: &mut dyn FnMut(Complex64) -> Complex64,
    rect: &Rectangle,
    initial_samples_per_side: usize,
) -> Result<i64> {
    let mut n = initial_samples_per_side.max(4);
    let budget = 16;
    for _ in 0..budget {
        match try_winding(f, rect, n)? {
            Some(count) => return Ok(count),
            None => n *= 2,
        }
    }
    Err(Error::NoPhaseConvergence)
}

fn boundary_point(rect: &Rectangle, t: f64) -> Complex64 {
    // t in [0, 4): one unit per side, counterclockwise from lower-left
    let (ll, ur) = (rect.lower_left, rect.upper_right);
    let (w, h) = (rect.width(), rect.height());
    let s = t.rem_euclid(4.0);
    if s < 1.0 {
        Complex64::new(ll.re + s * w, ll.im)
    } else if s < 2.0 {
        Complex64::new(ur.re, ll.im + (s - 1.0) * h)
    } else if s < 3.0 {
        Complex64::new(ur.re - (s - 2.0) * w, ur.im)
    } else {
        Complex64::new(ll.re, ur.im - (s - 3.0) * h)
    }
}

fn try_winding(
    f: &mut dyn FnMut(Complex64) -> Complex64,
    rect: &Rectangle,
    samples_per_side: usize,
) -> Result<Option<i64>> {
    let total = 4 * samples_per_side;
    let scale = rect.width().hypot(rect.height());
    let mut phase_sum = 0.0f64;
    let mut prev = f(boundary_point(rect, 0.0));
    let first = prev;
    for k in 1..=total {
        let t = 4.0 * k as f64 / total as f64;
        let value = if k == total {
            first
        } else {
            f(boundary_point(rect, t))
        };
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonFiniteSample);
        }
        if value.norm() <= 1e-13 * scale.max(1.0) {
            return Err(Error::ZeroOnContour);
        }
        let increment = (value / prev).arg();
        if increment.abs() >= std::f64::consts::FRAC_PI_2 {
            return Ok(None);
        }
        phase_sum += increment;
        prev = value;
    }
    Ok(Some((phase_sum / std::f64::consts::TAU).round() as i64))
}

/// Localize a zero inside `rect` by recursive quadrant subdivision, down to a
/// box of diameter `xtol`. Returns the final box center and the zero count.
pub fn localize_zero(
    f: &mut dyn FnMut(Complex64) -> Complex64,
    rect: &Rectangle,
    xtol: f64,
) -> Result<(Complex64, i64)> {
    let mut current = *rect;
    let mut count = winding_number(f, &current, 16)?;
    if count == 0 {
        return Ok((current.center(), 0));
    }
    while current.width().hypot(current.height()) > xtol {
        let c = current.center();
        let quads = [
            Rectangle {
                lower_left: current.lower_left,
                upper_right: c,
            },
            Rectangle {
                lower_left: Complex64::new(c.re, current.lower_left.im),
                upper_right: Complex64::new(current.upper_right.re, c.im),
            },
            Rectangle {
                lower_left: c,
                upper_right: current.upper_right,
            },
            Rectangle {
                lower_left: Complex64::new(current.lower_left.re, c.im),
                upper_right: Complex64::new(c.re, current.upper_right.im),
            },
        ];
        let mut advanced = false;
        for q in quads {
            // a zero on an internal edge shows up as ZeroOnContour; nudging
            // the subdivision is handled by the caller choosing the rectangle
            match winding_number(f, &q, 8) {
                Ok(c2) if c2 != 0 => {
                    current = q;
                    count = c2;
                    advanced = true;
                    break;
                }
                _ => {}
            }
        }
        if !advanced {
            break;
        }
    }
    Ok((current.center(), count))
}
