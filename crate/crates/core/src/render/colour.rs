pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];
pub const GREEN: Rgb = [0, 160, 0];

const ZERO_ANCHORS: [Rgb; 5] = [[230, 0, 0], [0, 190, 0], [0, 60, 230], [140, 0, 170], [150, 150, 150]];
const ESCAPE_ANCHORS: [Rgb; 2] = [[255, 235, 0], [200, 0, 0]];

/// `ln(1 + steps) / ln(1 + budget)`, in `[0, 1]`.
pub fn step_fraction(steps: u64, budget: u64) -> f64 {
    if budget == 0 {
        return 0.0;
    }
    ((steps as f64).ln_1p() / (budget as f64).ln_1p()).clamp(0.0, 1.0)
}

fn ramp(anchors: &[Rgb], t: f64) -> Rgb {
    let segments = (anchors.len() - 1) as f64;
    let x = t.clamp(0.0, 1.0) * segments;
    let k = (x.floor() as usize).min(anchors.len() - 2);
    let f = x - k as f64;
    let (a, b) = (anchors[k], anchors[k + 1]);
    std::array::from_fn(|c| (a[c] as f64 + f * (b[c] as f64 - a[c] as f64)).round() as u8)
}

/// Red (fast) through green, blue and purple to grey (slow).
pub fn zero_ramp(steps: u64, budget: u64) -> Rgb {
    ramp(&ZERO_ANCHORS, step_fraction(steps, budget))
}

/// Yellow (fast) to red (slow).
pub fn escape_ramp(steps: u64, budget: u64) -> Rgb {
    ramp(&ESCAPE_ANCHORS, step_fraction(steps, budget))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_hit_exactly() {
        assert_eq!(zero_ramp(0, 100), ZERO_ANCHORS[0]);
        assert_eq!(zero_ramp(100, 100), ZERO_ANCHORS[4]);
        assert_eq!(escape_ramp(0, 100), ESCAPE_ANCHORS[0]);
        assert_eq!(escape_ramp(100, 100), ESCAPE_ANCHORS[1]);
        assert_eq!(step_fraction(5, 0), 0.0);
    }
}
