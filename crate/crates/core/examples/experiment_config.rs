//! TOML experiment descriptions: parsing, defaults, overrides and scenario
//! resolution, without running anything.
//!
//! cargo run --example experiment_config

use pamshape::config::{parse_config, preset};

const TEXT: &str = r#"
[rate]
net_rate = 200e9
fec_overhead_percent = 7

[[scenario]]
baud = 71e9
mode = "uniform"

[[scenario]]
baud = 85e9
mode = "cap"
alpha = 3.5

[link.fiber]
length_km = 5

[sweep]
rop = "-12:0.5:-4"
"#;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = parse_config(TEXT)?;
    for s in cfg.scenarios()? {
        println!(
            "{:<22} H = {:.4}  AWG {:.0} GSa/s  outer P = {:.4}",
            s.label,
            s.plan.entropy,
            s.awg_rate_hz / 1e9,
            s.distribution.outer_probability()
        );
    }
    println!("{} ROP points", cfg.rops()?.len());

    let tweaked = cfg.with_overrides(&["scenario.1.alpha=5".into(), "link.soa.nf_db=6".into()])?;
    println!("after overrides: alpha {:?}, NF {} dB", tweaked.scenario[1].alpha, tweaked.link.soa.nf_db);

    // A declared entropy that does not carry the net rate is refused.
    let bad = TEXT.replace("alpha = 3.5", "alpha = 3.5\nentropy = 2.3867");
    if let Err(e) = parse_config(&bad) {
        println!("rejected: {e}");
    }

    let desk = preset("desk-scale")?;
    let echo = desk.to_toml_string()?;
    println!("desk-scale preset: {} lines of TOML with every default filled in", echo.lines().count());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
