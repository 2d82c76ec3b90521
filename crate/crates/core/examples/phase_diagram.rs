//! Stability regions in the (frequency, amplitude) plane.

use vibcav::stability::{
    amplitude_frequency_curve, homographic_realizations, instability_threshold, max_amplitude, phase_diagram_scan,
    Verdict,
};

fn main() {
    let scan = phase_diagram_scan((1.0, 6.0), (0.0, 1.0), (51, 21));
    let glyph = |v: Verdict| match v {
        Verdict::Stable => '.',
        Verdict::PowerLike => '+',
        Verdict::Exponential => '#',
        Verdict::Forbidden => ' ',
        Verdict::Undefined => '?',
    };
    // Amplitude decreasing downwards, frequency to the right.
    for j in (0..21).rev() {
        let line: String = (0..51).map(|i| glyph(scan[i * 21 + j].verdict)).collect();
        println!("{:5.2} |{line}", scan[j].amplitude_ratio);
    }
    println!("       1.0{:>48}", "6.0");

    println!("\n  w/w1   finite-family dL/L   threshold   max");
    for r in [1.5, 2.5, 3.5, 4.5, 5.5] {
        println!(
            "  {r:4.1}   {:18.6}   {:9.6}   {:6.4}",
            amplitude_frequency_curve(r),
            instability_threshold(r),
            max_amplitude(r)
        );
    }

    let models = homographic_realizations(2.5, 0.3, std::f64::consts::PI);
    for m in models {
        println!("(2.5, 0.3) realized by v0 = {:.6}, v1 = {:.6}, M = {}", m.v0.unwrap_or(f64::NAN), m.v1.unwrap_or(f64::NAN), m.m);
    }
}
