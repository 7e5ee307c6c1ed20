use strongfield::units::{cutoff_index, HydrogenicAtom, LaserField};
use strongfield::ww::{
    analytic_spectrum, dipole_time_series, gamma_closed, gamma_numeric, harmonic_lines, time_grid,
};

fn laser_for(atom: &HydrogenicAtom, gamma: f64, w_over_ib: f64) -> LaserField {
    let w = w_over_ib * atom.ionization_energy;
    let up = atom.ionization_energy / (2.0 * gamma * gamma);
    LaserField::new(2.0 * w * up.sqrt(), w, 0.0).unwrap()
}

#[test]
fn closed_and_numeric_agree_over_sweep() {
    let atom = HydrogenicAtom::hydrogen();
    for i in 0..5 {
        for j in 0..5 {
            let g = 0.3 + 0.7 * f64::from(i) / 4.0;
            let r = 0.02 + 0.18 * f64::from(j) / 4.0;
            let laser = laser_for(&atom, g, r);
            let n_max = cutoff_index(laser.omega, atom.ionization_energy) + 60;
            let a = gamma_closed(&atom, &laser, n_max).unwrap();
            let b = gamma_numeric(&atom, &laser, n_max).unwrap();
            let rel = ((a.gamma - b.gamma) / a.gamma).abs();
            assert!(rel < 0.05, "γ={g} ω/I_B={r}: rel {rel}");
            for (c, d) in a.channels.iter().zip(b.channels.iter().filter(|c| c.n >= a.n0)) {
                assert_eq!(c.order, d.order);
                assert!(c.rate >= 0.0 && d.rate >= 0.0);
            }
            assert!(b.channels.iter().filter(|c| c.n < a.n0).all(|c| c.rate == 0.0));
        }
    }
}

#[test]
fn stark_shift_is_stable_under_excision_refinement() {
    let atom = HydrogenicAtom::hydrogen();
    let laser = laser_for(&atom, 0.7, 0.1);
    let d = gamma_numeric(&atom, &laser, 20).unwrap();
    let s = d.stark_half.unwrap();
    assert!(s.is_finite());
    assert!(d.pv_stability.unwrap() < 1e-6 * s.abs(), "{} vs {s}", d.pv_stability.unwrap());
}

fn hwhm_of(freqs: &[f64], spec: &[f64], center: f64) -> f64 {
    // locate the peak near `center`, then the half-maximum crossings
    let (ip, _) = freqs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - center).abs().total_cmp(&(b.1 - center).abs()))
        .unwrap();
    let peak = spec[ip];
    let cross = |step: isize| {
        let mut i = ip as isize;
        while spec[(i + step) as usize] > peak / 2.0 {
            i += step;
        }
        let (a, b) = (i as usize, (i + step) as usize);
        let t = (spec[a] - peak / 2.0) / (spec[a] - spec[b]);
        freqs[a] + t * (freqs[b] - freqs[a])
    };
    0.5 * (cross(1) - cross(-1))
}

#[test]
fn line_widths_and_parseval() {
    let atom = HydrogenicAtom::hydrogen();
    let laser = laser_for(&atom, 0.8, 0.1);
    let mut decay = gamma_closed(&atom, &laser, 30).unwrap();
    // a width well inside the line spacing
    decay.gamma = 2e-3;
    decay.stark_half = Some(3e-4);
    let lines = harmonic_lines(&atom, &laser, &decay, 10).unwrap();
    let times = time_grid(&laser, decay.gamma, 8.0, 200).unwrap();
    let series = dipole_time_series(&lines, decay.gamma, 3e-4, &times);

    for l in lines.iter().filter(|l| l.amplitude > 0.0).take(3) {
        let freqs: Vec<f64> = (-400..=400).map(|i| l.center + f64::from(i) * 2.5e-5).collect();
        let num = series.spectrum(&freqs);
        let ana = analytic_spectrum(&lines, &freqs);
        let w = hwhm_of(&freqs, &num, l.center);
        assert!((w / decay.gamma - 1.0).abs() < 0.02, "order {}: hwhm {w}", l.order);
        let wa = hwhm_of(&freqs, &ana, l.center);
        assert!((wa / decay.gamma - 1.0).abs() < 0.02);
        // shared shift: peak at (2n+1)ω + δω/2
        let (ip, _) = num.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        assert!((freqs[ip] - l.center).abs() <= 2.5e-5);
    }

    let e_t = series.energy();
    let e_f = series.lorentzian_energy();
    assert!(((e_t - e_f) / e_f).abs() < 0.01, "{e_t} vs {e_f}");
}

#[test]
fn zero_width_limit_gives_sharp_lines() {
    let atom = HydrogenicAtom::hydrogen();
    let laser = laser_for(&atom, 0.8, 0.1);
    let decay = gamma_closed(&atom, &laser, 30).unwrap();
    let lines = harmonic_lines(&atom, &laser, &decay, 10).unwrap();
    let times: Vec<f64> = (0..200).map(|i| f64::from(i) * 0.3).collect();
    let s = dipole_time_series(&lines, 0.0, 0.0, &times);
    // undamped: the envelope is flat, so ⟨x⟩ returns to its t = 0 value every period
    let t = laser.period();
    let back = dipole_time_series(&lines, 0.0, 0.0, &[0.0, t]);
    assert!((back.values[0] - back.values[1]).abs() < 1e-9 * back.values[0].abs());
    assert!(s.values.iter().all(|v| v.is_finite()));
}
