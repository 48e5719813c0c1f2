//! Recomputes every Z1 of the published linguistic comparison from its
//! printed percentages and group sizes.

use stancenet::lingstats::{p_value, z_prop};

const N_PRO: usize = 310_461;
const N_ANTI: usize = 277_649;

// (category, T1 pro %, T1 anti %, reported Z1), percentages as printed.
const ROWS: [(&str, &str, &str, f64); 18] = [
    ("Intensifiers", "45.90", "50.60", -36.25),
    ("Amplifiers", "31.40", "37.10", -45.32),
    ("Swear words", "4.0", "5.60", -27.40),
    ("General interjections", "17.50", "16.70", 7.89),
    ("Exclamation", "1.10", "2.20", -34.17),
    ("Uncertainty words", "5.7", "7.0", -20.84),
    ("Pronouns", "55.80", "62.20", -49.68),
    ("Demonstrative", "17.63", "20.91", -31.84),
    ("Possessive", "1.30", "1.60", -9.39),
    ("Quantifier", "15.3", "16.0", -6.70),
    ("Reflexive", ".80", ".86", -2.26),
    ("First-Person", "21.20", "23.44", -20.67),
    ("Second-Person", "16.40", "18.5", -20.69),
    ("Third-Person", "14.8", "20.9", -60.51),
    ("Gendered third-person", "3.60", "5.60", -36.84),
    ("Subject", "28.90", "37.50", -69.53),
    ("Object", "21.64", "26.90", -46.77),
    ("IT", "8.30", "10.29", -26.16),
];

/// Value as a proportion and half a unit of its last printed digit.
fn printed(pct: &str) -> (f64, f64) {
    let decimals = pct.split_once('.').map_or(0, |(_, d)| d.len());
    let half_unit = 0.5 * 10f64.powi(-(decimals as i32)) / 100.0;
    (pct.parse::<f64>().unwrap() / 100.0, half_unit)
}

fn z(p1: f64, p2: f64) -> f64 {
    z_prop(p1, N_PRO, p2, N_ANTI).unwrap()
}

#[test]
fn headline_rows_within_one() {
    for name in ["Intensifiers", "Third-Person", "Subject"] {
        let &(_, a, b, reported) = ROWS.iter().find(|r| r.0 == name).unwrap();
        let got = z(printed(a).0, printed(b).0);
        assert!((got - reported).abs() <= 1.0, "{name}: {got} vs {reported}");
    }
}

#[test]
fn every_row_within_one_of_its_rounding_range() {
    for (name, a, b, reported) in ROWS {
        let ((p1, h1), (p2, h2)) = (printed(a), printed(b));
        let corners = [z(p1 - h1, p2 + h2), z(p1 + h1, p2 - h2)];
        let (lo, hi) = (corners[0].min(corners[1]), corners[0].max(corners[1]));
        assert!(
            lo - 1.0 <= reported && reported <= hi + 1.0,
            "{name}: reported {reported} outside [{lo:.2}, {hi:.2}] +/- 1"
        );
    }
}

#[test]
fn every_reported_z1_is_significant() {
    for (name, _, _, reported) in ROWS {
        assert!(p_value(reported) < 0.05, "{name}");
    }
}
