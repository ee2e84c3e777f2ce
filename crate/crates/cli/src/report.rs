//! Single-channel summary for the `channel` subcommand.

use thermstab::channel::{negativity, pta_channel, qpd_thermal, relaxation_probs, reset_approximation, ThermalParams};
use thermstab::dense::{channel_fidelity, kraus_thermal};

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub params: ThermalParams,
    pub rows: Vec<(&'static str, f64)>,
}

impl ChannelReport {
    pub fn new(params: ThermalParams) -> Self {
        let (p_gamma, p_phi) = relaxation_probs(&params);
        let exact = qpd_thermal(&params);
        let reset = reset_approximation(&params);
        let pta = pta_channel(p_gamma, p_phi);
        let kraus = kraus_thermal(&params);
        let rows = vec![
            ("t1", params.t1()),
            ("t2", params.t2()),
            ("tau", params.tau()),
            ("p1", params.p1()),
            ("p_gamma", p_gamma),
            ("p_phi", p_phi),
            ("q_identity", exact.q_identity),
            ("q_pauli_z", exact.q_pauli_z),
            ("q_reset0", exact.q_reset0),
            ("q_reset1", exact.q_reset1),
            ("gamma", negativity(&exact)),
            ("pta_p_x", pta.p_x),
            ("pta_p_y", pta.p_y),
            ("pta_p_z", pta.p_z),
            ("reset_q_identity", reset.q_identity),
            ("reset_q_reset0", reset.q_reset0),
            ("reset_q_reset1", reset.q_reset1),
            ("fidelity_exact_pta", channel_fidelity(&kraus, &pta)),
            ("fidelity_exact_reset", channel_fidelity(&kraus, &reset)),
        ];
        Self { params, rows }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.rows.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    pub fn to_text(&self) -> String {
        let v = |k| self.get(k).expect("row exists");
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!(
            "T1 = {}  T2 = {}  tau = {}  p1 = {}",
            v("t1"),
            v("t2"),
            v("tau"),
            v("p1")
        ));
        line(format!("p_gamma = {}  p_phi = {}", v("p_gamma"), v("p_phi")));
        line("exact decomposition:".into());
        for k in ["q_identity", "q_pauli_z", "q_reset0", "q_reset1"] {
            line(format!("  {k:<10} = {}", v(k)));
        }
        let positive = if v("q_pauli_z") >= 0.0 { "positive" } else { "negative" };
        line(format!("  Gamma      = {} ({positive})", v("gamma")));
        line(format!(
            "pauli twirl: p_x = {}  p_y = {}  p_z = {}",
            v("pta_p_x"),
            v("pta_p_y"),
            v("pta_p_z")
        ));
        line(format!(
            "reset approximation: q_identity = {}  q_reset0 = {}  q_reset1 = {}",
            v("reset_q_identity"),
            v("reset_q_reset0"),
            v("reset_q_reset1")
        ));
        line(format!("channel fidelity (exact, pta)   = {}", v("fidelity_exact_pta")));
        line(format!("channel fidelity (exact, reset) = {}", v("fidelity_exact_reset")));
        out
    }

    /// `quantity,value` rows.
    pub fn to_csv(&self) -> String {
        let mut text = String::from("quantity,value\n");
        for (k, v) in &self.rows {
            text.push_str(&format!("{k},{v}\n"));
        }
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_example() {
        let r = ChannelReport::new(ThermalParams::zero_temperature(1.0, 2.0, 1.0).unwrap());
        assert!((r.get("gamma").unwrap() - 1.2386512).abs() < 1e-6);
        assert!(r.get("q_pauli_z").unwrap() < 0.0);
        assert!(r.to_text().contains("(negative)"));
    }

    #[test]
    fn csv_has_every_row() {
        let r = ChannelReport::new(ThermalParams::zero_temperature(1.0, 1.0, 0.5).unwrap());
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), r.rows.len() + 1);
        assert!(csv.contains("\ngamma,1\n"));
        assert!(csv.contains("\nq_pauli_z,0\n"));
    }
}
