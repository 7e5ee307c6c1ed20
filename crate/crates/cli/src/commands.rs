use std::f64::consts::PI;

use num_complex::Complex64;
use strongfield::birkhoff::{birkhoff_solve, convergence_sweep, fitted_order, BirkhoffOptions, RandomHermitianFamily};
use strongfield::export::{num, Table};
use strongfield::kh::{comb_test, dipole_kick_integral, kick_coefficients, Coulomb, FourierComponentTable};
use strongfield::scenario::Scenario;
use strongfield::shifts::{coupling_table, diagonal_table, effective_hamiltonian, polynomial_table, shift_report, RigidityModel};
use strongfield::specfun::BoundState;
use strongfield::two_level::{
    bessel_truncation, direct_sigma1, even_to_odd_ratio, fft_harmonic_bins, odd_to_even_ratio, periodic_grid,
    remove_beat_line, sigma1_spectrum, transformed_hamiltonian_coeffs, TwoLevelParams,
};
use strongfield::units::{
    au_to_ev, cutoff_index, derive_regime, lifetime_fs, rydberg_kick_ratio, HydrogenicAtom, LaserField,
    LITERATURE_RYDBERG,
};
use strongfield::ww::{analytic_spectrum, dipole_time_series, gamma_closed, gamma_numeric, harmonic_lines, line_table, time_grid};
use strongfield::{Error, Result};

use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Derived scales and regime flags
    Regime,
    /// Fourier components of the Coulomb potential along the quiver segment
    Kh,
    /// Kick coefficients, comb test and Rydberg ratios
    Kick,
    /// Exact level-shift polynomials and shifted levels
    Shifts,
    /// Rigidity metric over a list of rho values
    Rigidity,
    /// Ionization width and Stark shift
    Rate,
    /// Harmonic lines, dipole time series and spectrum
    Spectrum,
    /// Strongly driven two-level system
    Twolevel,
    /// Leading-order adiabatic solver against direct integration
    BirkhoffDemo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Regime => "regime",
            Command::Kh => "kh",
            Command::Kick => "kick",
            Command::Shifts => "shifts",
            Command::Rigidity => "rigidity",
            Command::Rate => "rate",
            Command::Spectrum => "spectrum",
            Command::Twolevel => "twolevel",
            Command::BirkhoffDemo => "birkhoff-demo",
        }
    }
}

/// Largest principal quantum number accepted by the exact shift tables.
pub const MAX_SHIFT_N: u32 = 8;
/// Channels past the cutoff index used by `rate` unless overridden.
pub const RATE_CHANNELS: u32 = 60;
/// Lines past the cutoff index used by `spectrum` unless overridden.
pub const SPECTRUM_LINES: u32 = 10;
const KH_NODES: usize = 4096;
const KICK_SLOPES: usize = 31;
const SPECTRUM_EFOLDS: f64 = 8.0;

fn physics(s: &Scenario) -> Result<(HydrogenicAtom, LaserField)> {
    Ok((s.atom()?, s.laser()?))
}

/// Fills the options whose defaults depend on the command (and, for some,
/// on the physics of the scenario); the rest come from
/// [`Scenario::resolved`].
pub fn resolve(cmd: Command, mut s: Scenario) -> Result<Scenario> {
    let (atom, laser) = physics(&s)?;
    let o = &mut s.options;
    match cmd {
        Command::Kh => {
            o.truncation.get_or_insert(32);
        }
        Command::Kick => {
            o.truncation.get_or_insert(400);
        }
        Command::Rate | Command::Spectrum => {
            let n0 = cutoff_index(laser.omega, atom.ionization_energy);
            let extra = if cmd == Command::Rate { RATE_CHANNELS } else { SPECTRUM_LINES };
            o.max_n.get_or_insert(n0 + extra);
        }
        Command::Twolevel => {
            let rabi = o.two_level.clone().unwrap_or_default().rabi_over_omega;
            o.truncation.get_or_insert_with(|| bessel_truncation(2.0 * rabi).div_ceil(2).max(1));
            o.tolerance.get_or_insert(1e-12);
        }
        Command::BirkhoffDemo => {
            o.grid.get_or_insert(121);
        }
        Command::Regime | Command::Shifts | Command::Rigidity => {}
    }
    Ok(s.resolved())
}

pub fn run(cmd: Command, s: &Scenario) -> Result<Report> {
    let mut r = Report::new(cmd.name(), s.clone());
    match cmd {
        Command::Regime => regime(s, &mut r)?,
        Command::Kh => kh(s, &mut r)?,
        Command::Kick => kick(s, &mut r)?,
        Command::Shifts => shifts(s, &mut r)?,
        Command::Rigidity => rigidity(s, &mut r)?,
        Command::Rate => rate(s, &mut r)?,
        Command::Spectrum => spectrum(s, &mut r)?,
        Command::Twolevel => twolevel(s, &mut r)?,
        Command::BirkhoffDemo => birkhoff_demo(s, &mut r)?,
    }
    Ok(r)
}

// resolved scenarios carry every option
fn opt<T: Clone>(v: &Option<T>) -> T {
    v.clone().expect("option filled by resolve")
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn regime_warnings(atom: &HydrogenicAtom, laser: &LaserField, r: &mut Report) -> Result<()> {
    let g = derive_regime(laser, atom)?;
    if g.tunnelling {
        r.warn(format!("keldysh parameter {:.4} < 1: tunnelling regime", g.keldysh.unwrap_or(0.0)));
    }
    if !g.kick_regime {
        r.warn(format!(
            "epsilon = {:.4} is not below {}: the kick expansion does not apply",
            g.epsilon.unwrap_or(f64::INFINITY),
            g.kick_threshold
        ));
    }
    Ok(())
}

fn regime(s: &Scenario, r: &mut Report) -> Result<()> {
    let (atom, laser) = physics(s)?;
    let g = derive_regime(&laser, &atom)?;
    let mut t = Table::new(&["quantity", "value", "unit"]);
    let mut row = |q: &str, v: String, u: &str| t.push(vec![q.to_string(), v, u.to_string()]);
    row("omega", num(laser.omega), "hartree");
    row("photon_energy", num(au_to_ev(laser.omega)), "eV");
    row("field", num(laser.field), "a.u.");
    row("ionization_energy", num(atom.ionization_energy), "hartree");
    row("ponderomotive_energy", num(g.ponderomotive), "hartree");
    row("ponderomotive_energy", num(au_to_ev(g.ponderomotive)), "eV");
    row("quiver_amplitude", num(g.quiver_amplitude), "bohr");
    row("keldysh", g.keldysh.map_or("inf".into(), num), "1");
    row("epsilon", g.epsilon.map_or("inf".into(), num), "1");
    row("excursion_ratio", num(g.excursion_ratio), "1");
    row("cutoff_index", g.cutoff_index.to_string(), "1");
    row("tunnelling", g.tunnelling.to_string(), "flag");
    row("kick_regime", g.kick_regime.to_string(), "flag");
    r.table("regime", t);
    r.set("cutoff_index", g.cutoff_index);
    regime_warnings(&atom, &laser, r)
}

fn kh(s: &Scenario, r: &mut Report) -> Result<()> {
    let (atom, laser) = physics(s)?;
    let lambda = laser.quiver_amplitude();
    let k_max = opt(&s.options.truncation);
    let xs = linspace(-2.0 * lambda, 2.0 * lambda, opt(&s.options.grid));
    // off the polarization axis by one Bohr radius: the Coulomb segment
    // integral is singular on it
    let table = FourierComponentTable::build(&Coulomb { z: atom.z_eff }, lambda, &xs, [atom.bohr_radius, 0.0], k_max, KH_NODES)?;
    let mut t = Table::new(&["x", "k", "v_k"]);
    for (x, k, v) in table.rows() {
        t.push(vec![num(x), k.to_string(), num(v)]);
    }
    r.set("quiver_amplitude", num(lambda));
    r.set("transverse_offset", num(atom.bohr_radius));
    r.set("chebyshev_nodes", KH_NODES);
    r.table("components", t);
    let eta = atom.bohr_radius / lambda;
    r.set("eta", num(eta));
    if eta <= 0.1 {
        let log = 2.0 / PI * (1.0 / eta).ln();
        let mut d = Table::new(&["k", "integral", "ratio_to_log"]);
        for k in 1..=k_max {
            let i = dipole_kick_integral(k, eta)?;
            d.push(vec![k.to_string(), num(i), num(i / log)]);
        }
        r.table("dipole_integrals", d);
    } else {
        r.warn(format!("eta = a_B/lambda_L = {eta:.4} > 0.1: dipole kick integrals not evaluated"));
    }
    regime_warnings(&atom, &laser, r)
}

fn kick(s: &Scenario, r: &mut Report) -> Result<()> {
    let (atom, laser) = physics(s)?;
    let k_max = opt(&s.options.truncation);
    let kc = kick_coefficients(&atom, &laser, KICK_SLOPES)?;
    let mut t = Table::new(&["order", "slope"]);
    for k in &kc.slopes {
        t.push(vec![k.order.to_string(), num(k.slope)]);
    }
    r.set("epsilon", num(kc.epsilon));
    r.set("eta", num(kc.eta));
    r.set("half_period", num(kc.half_period));
    r.set("kick_regime", kc.kick_regime);
    r.table("coefficients", t);

    let w = laser.omega;
    let c = comb_test(w, k_max, 0.4 / w, 1.5 / w)?;
    let mut t = Table::new(&["truncation", "center", "width", "series", "comb", "relative_error"]);
    t.push(vec![c.truncation.to_string(), num(c.center), num(c.width), num(c.series), num(c.comb), num(c.relative_error)]);
    r.set("comb_relative_error", num(c.relative_error));
    r.table("comb_test", t);

    let mut t = Table::new(&["field_V_m", "frequency_Hz", "n0", "excursion_form", "energy_form", "literature", "factor"]);
    let mut forms = Vec::new();
    for &(e, f, n0, lit) in &LITERATURE_RYDBERG {
        let q = rydberg_kick_ratio(n0, e, f)?;
        t.push(vec![
            num(e),
            num(f),
            n0.to_string(),
            num(q.excursion_form),
            num(q.energy_form),
            num(lit),
            num(q.excursion_form / lit),
        ]);
        forms.push((q.excursion_form, lit));
    }
    r.table("rydberg", t);
    let (a, b) = (forms[0], forms[1]);
    r.set("rydberg_ratio", num(a.0 / b.0));
    r.set("rydberg_literature_ratio", num(a.1 / b.1));
    r.warn(format!(
        "Rydberg ratios evaluated with omega = 2 pi f differ from the quoted absolute values by factors {:.4e} and {:.4e}; only their ratio is reproduced",
        a.0 / a.1,
        b.0 / b.1
    ));
    regime_warnings(&atom, &laser, r)
}

fn shift_n(s: &Scenario) -> Result<u32> {
    let n = opt(&s.options.max_n);
    if n > MAX_SHIFT_N {
        return Err(Error::InvalidInput(format!("max_n = {n} exceeds the supported {MAX_SHIFT_N} for exact shift tables")));
    }
    Ok(n)
}

fn shifts(s: &Scenario, r: &mut Report) -> Result<()> {
    let (atom, laser) = physics(s)?;
    let n = shift_n(s)?;
    r.table("diagonal", polynomial_table(&diagonal_table(n)?));
    if n >= 2 {
        r.table("couplings", polynomial_table(&coupling_table(n)?));
    }
    let eh = effective_hamiltonian(&BoundState::manifold(n), &atom, &laser)?;
    let mut t = Table::new(&["n", "l", "lz", "unshifted", "shift", "energy"]);
    for l in &eh.levels {
        t.push(vec![l.state.n.to_string(), l.state.l.to_string(), l.state.lz.to_string(), num(l.unshifted), num(l.shift), num(l.energy)]);
    }
    r.set("rho", num(eh.rho));
    r.set("rigidity", num(eh.rigidity.metric));
    for w in &eh.warnings {
        r.warn(w);
    }
    let mut text = shift_report(n)?;
    text.push_str(&format!("\nshifted levels at rho = {}, hartree\n", num(eh.rho)));
    text.push_str(&t.to_text());
    r.text = Some(text);
    r.table("levels", t);
    Ok(())
}

fn rigidity(s: &Scenario, r: &mut Report) -> Result<()> {
    let (atom, laser) = physics(s)?;
    let n = shift_n(s)?;
    let tol = opt(&s.options.tolerance);
    let model = RigidityModel::new(&BoundState::manifold(n), &[BoundState::ground()])?;
    let mut t = Table::new(&["rho", "metric", "state", "source", "coupling", "gap"]);
    let mut metrics = Vec::new();
    for &rho in &opt(&s.options.rho) {
        let m = model.metric(rho, tol)?;
        let (a, b) = m.pair.map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
        t.push(vec![num(rho), num(m.metric), a, b, num(m.coupling), num(m.gap)]);
        metrics.push(m.metric);
    }
    r.table("rigidity", t);
    r.set("monotone_decreasing", metrics.windows(2).all(|w| w[1] < w[0]));
    let rho = (laser.quiver_amplitude() / atom.bohr_radius).powi(2);
    r.set("scenario_rho", num(rho));
    r.set("scenario_metric", num(model.metric(rho, tol)?.metric));
    Ok(())
}

fn rate(s: &Scenario, r: &mut Report) -> Result<()> {
    let (atom, laser) = physics(s)?;
    let n_max = opt(&s.options.max_n);
    let closed = gamma_closed(&atom, &laser, n_max)?;
    let numeric = gamma_numeric(&atom, &laser, n_max)?;
    let stark = numeric.stark_half.unwrap_or(f64::NAN);
    r.set("n0", numeric.n0);
    r.set("n_max", n_max);
    r.set("gamma_closed", num(closed.gamma));
    r.set("gamma_numeric", num(numeric.gamma));
    r.set("relative_difference", num((closed.gamma - numeric.gamma).abs() / closed.gamma));
    r.set("gamma_eV", num(closed.gamma_ev));
    r.set("lifetime_fs", num(lifetime_fs(closed.gamma_ev)));
    r.set("tail_bound", num(closed.tail_bound));
    r.set("stark_half", num(stark));
    r.set("stark_half_eV", num(au_to_ev(stark)));
    r.set("pv_stability", num(numeric.pv_stability.unwrap_or(f64::NAN)));
    if closed.gamma > 0.1 * laser.omega {
        r.warn(format!("Gamma/omega = {:.3}: the decay is not slow on the drive time scale", closed.gamma / laser.omega));
    }
    r.warn(format!("the a.c. Stark shift grows with the channel cutoff; value is for n_max = {n_max}"));
    let mut t = Table::new(&["n", "order", "rate_closed", "rate_numeric", "shift"]);
    for c in &numeric.channels {
        let cl = closed.channels.iter().find(|x| x.n == c.n).map_or(0.0, |x| x.rate);
        t.push(vec![c.n.to_string(), c.order.to_string(), num(cl), num(c.rate), num(c.shift)]);
    }
    r.table("channels", t);
    regime_warnings(&atom, &laser, r)
}

fn spectrum(s: &Scenario, r: &mut Report) -> Result<()> {
    let (atom, laser) = physics(s)?;
    let n_max = opt(&s.options.max_n);
    let decay = gamma_numeric(&atom, &laser, n_max)?;
    let stark = decay.stark_half.unwrap_or(0.0);
    let lines = harmonic_lines(&atom, &laser, &decay, n_max)?;
    let per_period = (4 * (2 * n_max as usize + 1)).max(40);
    let times = time_grid(&laser, decay.gamma, SPECTRUM_EFOLDS, per_period)?;
    let series = dipole_time_series(&lines, decay.gamma, stark, &times);
    let freqs = linspace(0.0, f64::from(2 * n_max + 2) * laser.omega, opt(&s.options.grid));
    let spec = analytic_spectrum(&lines, &freqs);
    let mut t = Table::new(&["nu", "intensity"]);
    for (f, v) in freqs.iter().zip(&spec) {
        t.push(vec![num(*f), num(*v)]);
    }
    let g = derive_regime(&laser, &atom)?.keldysh.unwrap_or(f64::INFINITY);
    r.set("n0", decay.n0);
    r.set("n_max", n_max);
    r.set("gamma", num(decay.gamma));
    r.set("stark_half", num(stark));
    r.set("envelope_peak_x", num(2.0 * g * g / 7.0));
    r.set("energy_time", num(series.energy()));
    r.set("energy_lines", num(series.lorentzian_energy()));
    if decay.gamma > 0.1 * laser.omega {
        r.warn(format!(
            "Gamma/omega = {:.3}: neighbouring lines overlap and the isolated-line picture is qualitative",
            decay.gamma / laser.omega
        ));
    }
    r.table("lines", line_table(&lines));
    r.table("time_series", series.table());
    r.table("spectrum", t);
    regime_warnings(&atom, &laser, r)
}

fn twolevel(s: &Scenario, r: &mut Report) -> Result<()> {
    let laser = s.laser()?;
    let spec = opt(&s.options.two_level);
    let w = laser.omega;
    let p = TwoLevelParams::new(
        spec.delta_over_omega * w,
        spec.rabi_over_omega * w,
        w,
        Complex64::new(spec.a1[0], spec.a1[1]),
        Complex64::new(spec.a2[0], spec.a2[1]),
    )?;
    let n_max = opt(&s.options.truncation);
    let h = transformed_hamiltonian_coeffs(&p, n_max)?;
    let times = periodic_grid(&p, spec.periods, spec.per_period);
    let (series, analytic) = sigma1_spectrum(&p, &times, Some(n_max));
    let (direct, drift) = direct_sigma1(&p, &times, opt(&s.options.tolerance))?;
    let diff: f64 = analytic.iter().zip(&direct).map(|(a, d)| (a - d).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = direct.iter().map(|d| d * d).sum::<f64>().sqrt();
    let max_abs = analytic.iter().zip(&direct).map(|(a, d)| (a - d).abs()).fold(0.0, f64::max);

    let max_order = (2 * n_max + 1).min(spec.per_period / 2 - 1);
    let dr = p.renormalized_splitting();
    let bins_d = fft_harmonic_bins(&remove_beat_line(&direct, &times, spec.periods, dr)?, spec.periods, max_order)?;
    let bins_a = fft_harmonic_bins(&remove_beat_line(&analytic, &times, spec.periods, dr)?, spec.periods, max_order)?;
    let mut fb = Table::new(&["order", "direct", "analytic"]);
    for (a, b) in bins_d.iter().zip(&bins_a) {
        fb.push(vec![a.order.to_string(), num(a.amplitude), num(b.amplitude)]);
    }
    let mut ts = Table::new(&["t", "analytic", "direct"]);
    for ((t, a), d) in times.iter().zip(&analytic).zip(&direct) {
        ts.push(vec![num(*t), num(*a), num(*d)]);
    }
    r.set("bessel_argument", num(p.bessel_argument()));
    r.set("delta_r", num(dr));
    r.set("n_max", n_max);
    r.set("hamiltonian_tail_bound", num(h.tail_bound));
    r.set("series_tail_bound", num(series.tail_bound));
    r.set("l2_relative", num(diff / scale));
    r.set("max_abs", num(max_abs));
    r.set("norm_drift", num(drift));
    // past order ~z the Bessel content is gone and both parities sit at the
    // integration noise floor
    let ratio_orders = max_order.min((0.75 * p.bessel_argument()).floor() as usize).max(3);
    let head = &bins_d[..=ratio_orders.min(max_order)];
    r.set("ratio_max_order", ratio_orders.min(max_order));
    r.set("even_to_odd", num(even_to_odd_ratio(head)));
    r.set("odd_to_even", num(odd_to_even_ratio(head)));
    for a in p.advisories() {
        r.warn(a);
    }
    r.table("hamiltonian", h.table());
    r.table("series", series.table());
    r.table("time_series", ts);
    r.table("fft_bins", fb);
    Ok(())
}

fn birkhoff_demo(s: &Scenario, r: &mut Report) -> Result<()> {
    let spec = opt(&s.options.birkhoff);
    let fam = RandomHermitianFamily::new(spec.dim, spec.seed, spec.coupling);
    let a0 = vec![Complex64::new(1.0 / (spec.dim as f64).sqrt(), 0.0); spec.dim];
    let times = linspace(0.0, spec.t_end, opt(&s.options.grid));
    let eps: Vec<f64> = (0..=spec.halvings).map(|k| spec.epsilon / 2f64.powi(k as i32)).collect();
    let opts = BirkhoffOptions::default();
    let pts = convergence_sweep(|t| fam.eval(t), &eps, &a0, &times, &opts)?;
    let mut t = Table::new(&["epsilon", "error", "ratio_to_next"]);
    for (i, p) in pts.iter().enumerate() {
        let ratio = pts.get(i + 1).map_or(String::new(), |q| num(p.error / q.error));
        t.push(vec![num(p.epsilon), num(p.error), ratio]);
    }
    r.set("fitted_order", num(fitted_order(&pts)));
    r.table("convergence", t);
    let sol = birkhoff_solve(|t| fam.eval(t), eps[eps.len() - 1], &a0, &times, &opts)?;
    r.set("min_gap", num(sol.gap.min_gap));
    r.table("trajectory", sol.table());
    Ok(())
}
