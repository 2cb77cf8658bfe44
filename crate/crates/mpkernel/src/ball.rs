use rug::float::Round;
use rug::ops::AssignRound;
use rug::Float;

/// Midpoint-radius real interval. The radius only ever grows.
#[derive(Clone, Debug)]
pub struct Ball {
    pub mid: Float,
    pub rad: Float,
}

fn ulp_bound(x: &Float) -> Float {
    // one unit in the last place, rounded up
    let p = x.prec();
    if x.is_zero() {
        return Float::new(53);
    }
    let e = x.get_exp().unwrap_or(0);
    Float::with_val(53, Float::i_exp(1, e - p as i32 + 1))
}

fn add_up(a: &Float, b: &Float) -> Float {
    let mut r = Float::new(53);
    r.assign_round(a + b, Round::Up);
    r
}

fn mul_up(a: &Float, b: &Float) -> Float {
    let mut r = Float::new(53);
    r.assign_round(a * b, Round::Up);
    r
}

impl Ball {
    pub fn exact(mid: Float) -> Self {
        Ball { mid, rad: Float::new(53) }
    }

    pub fn new(mid: Float, rad: Float) -> Self {
        Ball { mid, rad: Float::with_val(53, rad.abs()) }
    }

    pub fn add(&self, o: &Ball) -> Ball {
        let p = self.mid.prec().max(o.mid.prec());
        let mid = Float::with_val(p, &self.mid + &o.mid);
        let rad = add_up(&add_up(&self.rad, &o.rad), &ulp_bound(&mid));
        Ball { mid, rad }
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let p = self.mid.prec().max(o.mid.prec());
        let mid = Float::with_val(p, &self.mid * &o.mid);
        let a = Float::with_val(53, self.mid.abs_ref());
        let b = Float::with_val(53, o.mid.abs_ref());
        let mut rad = add_up(&mul_up(&a, &o.rad), &mul_up(&b, &self.rad));
        rad = add_up(&rad, &mul_up(&self.rad, &o.rad));
        rad = add_up(&rad, &ulp_bound(&mid));
        Ball { mid, rad }
    }

    /// Widens the radius by an externally certified bound, e.g. a series tail.
    pub fn inflate(&self, extra: &Float) -> Ball {
        Ball { mid: self.mid.clone(), rad: add_up(&self.rad, &Float::with_val(53, extra.abs_ref())) }
    }

    pub fn contains(&self, x: &Float) -> bool {
        let d = Float::with_val(self.mid.prec().max(x.prec()), x - &self.mid).abs();
        d <= self.rad
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_is_monotone() {
        let a = Ball::new(Float::with_val(100, 1.5), Float::with_val(53, 1e-20));
        let b = Ball::new(Float::with_val(100, -2.25), Float::with_val(53, 1e-25));
        let s = a.add(&b);
        let m = a.mul(&b);
        assert!(s.rad >= a.rad && s.rad >= b.rad);
        assert!(m.rad >= Float::with_val(53, 2.25e-20));
        assert!(m.contains(&Float::with_val(100, -3.375)));
    }

    #[test]
    fn third_is_enclosed() {
        let three = Ball::exact(Float::with_val(80, 3));
        let third = Ball::new(Float::with_val(80, 1) / 3u32, Float::with_val(53, 1e-24));
        let one = three.mul(&third);
        assert!(one.contains(&Float::with_val(80, 1)));
    }
}
