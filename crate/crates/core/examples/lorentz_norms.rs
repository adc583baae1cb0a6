//! Decreasing rearrangements, Lorentz norms and Sobolev-Fourier-Lorentz
//! norms of fields.

use fl_nse::io::initial::{generate_initial_data, InitialData};
use fl_nse::lorentz::{
    classical_sobolev_norm, fourier_lebesgue_norm, lebesgue_norm, lorentz_norm, rearrange, sfl_norm, Atom,
};
use fl_nse::{Grid, NormSpec};

fn main() -> fl_nse::Result<()> {
    // two steps: height 3 on measure 1, height 1 on measure 2
    let profile = rearrange(&[Atom::new(1.0, 2.0), Atom::new(3.0, 1.0)])?;
    println!("f* values {:?}, right ends {:?}", profile.values(), profile.cum_measures());
    for t in [0.5, 1.0, 2.5, 4.0] {
        println!("  f*({t}) = {}", profile.eval(t));
    }
    println!("‖f‖_(1,1) = {}", lorentz_norm(&profile, 1.0, 1.0)?);
    println!("‖f‖_(2,2) = {} = ‖f‖_2 = {}", lorentz_norm(&profile, 2.0, 2.0)?, lebesgue_norm(&profile, 2.0)?);
    println!("‖f‖_(2,∞) = {}", lorentz_norm(&profile, 2.0, f64::INFINITY)?);
    println!("‖f‖_(2,1) = {}", lorentz_norm(&profile, 2.0, 1.0)?);

    // Taylor-Green has ‖u‖_L² = π√2 on [0, 2π)²
    let grid = Grid::periodic(2, 32)?;
    let u = generate_initial_data(&grid, &InitialData::TaylorGreen { amp: 1.0 })?;
    let l2 = sfl_norm(&u, &NormSpec::new(0.0, 2.0, 2.0)?)?;
    println!("Taylor-Green Ḣ⁰_𝓛^(2,2) = {l2:.15}, π√2 = {:.15}", std::f64::consts::PI * 2f64.sqrt());

    for (s, p, r) in [(0.0, 1.5, 3.0), (0.0, 1.5, 1.0), (1.0, 3.0, 2.0), (-0.5, 2.0, f64::INFINITY)] {
        let v = sfl_norm(&u, &NormSpec::new(s, p, r)?)?;
        println!("Ḣ^{s}_𝓛^({p},{r}) = {v:.12}");
    }

    // 𝓛^{p,p'} is the Fourier-Lebesgue space, and for p <= 2 it sits inside L^p
    let p = 1.5;
    let fl = fourier_lebesgue_norm(&u, 0.0, 3.0)?;
    let sfl = sfl_norm(&u, &NormSpec::new(0.0, p, 3.0)?)?;
    let classical = classical_sobolev_norm(&u, 0.0, p)?;
    println!("𝓛^(1.5,3) = {sfl:.12}, direct ‖û‖_3 = {fl:.12}, classical L^1.5 = {classical:.12}");

    // (∞, r < ∞) is infinite for nonzero data unless the sup surrogate is asked for
    let spec = NormSpec::new(0.0, 1.0, 2.0)?;
    println!(
        "𝓛^(1,2) literal = {}, sup surrogate = {:.12}",
        sfl_norm(&u, &spec)?,
        sfl_norm(&u, &spec.with_sup_surrogate(true))?
    );
    Ok(())
}
