//! Scratch numeric exploration (not part of the shipped surface).

use a2g_core::*;

fn main() {
    let presets = ScenarioPreset::ALL;

    println!("== LoS MCD, urban, 28 GHz, h_rx 2, thr 0.9 ==");
    for h_tr in [30.0, 120.0, 500.0] {
        let tpl = LinkTemplate::new(h_tr + 2.0, 2.0, 28e9);
        let r = mcd(
            PathKind::Los,
            0.9,
            &tpl,
            &ScenarioPreset::Urban.params(),
            BsMode::Corrected,
            1500.0,
            1.0,
        )
        .unwrap();
        println!("h_tr {h_tr}: mcd {:.1} flag {:?}", r.distance, r.flag);
    }

    println!("== GS MCD, presets, 1.4 GHz, 202/2, thr 0.8 ==");
    let tpl = LinkTemplate::new(202.0, 2.0, 1.4e9);
    for p in presets {
        let r = mcd(
            PathKind::Gs,
            0.8,
            &tpl,
            &p.params(),
            BsMode::Corrected,
            2000.0,
            1.0,
        )
        .unwrap();
        println!("{p}: mcd {:.1} flag {:?}", r.distance, r.flag);
    }

    println!("== BS optimal distance, presets, 1.4 GHz, 202/2 ==");
    for p in presets {
        let r = bs_optimal_distance(&tpl, &p.params(), BsMode::Corrected, 2000.0, 1.0).unwrap();
        println!(
            "{p}: d* {:.1} p* {:.4} flag {:?}",
            r.distance, r.probability, r.flag
        );
    }

    println!("== GS distance sweep 50..1000 step 50, monotonicity ==");
    for p in presets {
        let values: Vec<f64> = (1..=20).map(|k| k as f64 * 50.0).collect();
        let t = sweep(
            SweepAxis::Distance,
            &values,
            &tpl,
            None,
            &p.params(),
            BsMode::Corrected,
        )
        .unwrap();
        let mut viols = vec![];
        for (w, pair) in t.rows.windows(2).enumerate() {
            if pair[1].p_gs > pair[0].p_gs + 1e-12 {
                viols.push(format!(
                    "{}->{}: {:.4}->{:.4}",
                    values[w],
                    values[w + 1],
                    pair[0].p_gs,
                    pair[1].p_gs
                ));
            }
        }
        println!("{p}: violations {:?}", viols);
    }

    println!("== BS curve 25..1500 step 25, shape ==");
    for p in presets {
        let values: Vec<f64> = (1..=60).map(|k| k as f64 * 25.0).collect();
        let t = sweep(
            SweepAxis::Distance,
            &values,
            &tpl,
            None,
            &p.params(),
            BsMode::Corrected,
        )
        .unwrap();
        let probs: Vec<f64> = t.rows.iter().map(|r| r.p_bs).collect();
        let peak = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        // ascent runs after peak / descent runs before peak of length >= 2
        let mut bad = vec![];
        for i in 0..probs.len() - 2 {
            if i < peak && probs[i] > probs[i + 1] && probs[i + 1] > probs[i + 2] {
                bad.push(format!("descent@{}", values[i]));
            }
            if i >= peak && probs[i] < probs[i + 1] && probs[i + 1] < probs[i + 2] {
                bad.push(format!("ascent@{}", values[i]));
            }
        }
        println!(
            "{p}: peak at {:.0} (p {:.4}); 2-step violations {:?}",
            values[peak], probs[peak], bad
        );
        if p == ScenarioPreset::Urban {
            for (v, pr) in values.iter().zip(&probs) {
                if (450.0..=700.0).contains(v) {
                    println!("   d {v}: p_bs {pr:.4}");
                }
            }
        }
    }

    println!("== geometric oracle scan: |diff| per config ==");
    for path in [PathKind::Los, PathKind::Gs, PathKind::Bs] {
        for preset in presets {
            let params = preset.params();
            let (htx, f) = match path {
                PathKind::Los => (122.0, 28e9),
                _ => (202.0, 1.4e9),
            };
            for d in [100.0, 150.0, 200.0, 250.0, 300.0, 350.0, 400.0, 500.0, 600.0, 800.0] {
                let link = LinkGeometry::new(htx, 2.0, d, f).unwrap();
                let analytic = match path {
                    PathKind::Los => los_probability(&link, &params),
                    PathKind::Gs => gs_probability(&link, &params).unwrap(),
                    PathKind::Bs => bs_probability(&link, &params, BsMode::Corrected).unwrap(),
                };
                let est = mc_geometric(path, &link, &params, 600, 12345).unwrap();
                let diff = est.p_hat - analytic;
                let mark = if diff.abs() <= 0.08 { " <== " } else { "" };
                println!(
                    "{path} {preset} d{d}: analytic {:.3} geo {:.3} diff {:+.3}{mark}",
                    analytic, est.p_hat, diff
                );
            }
        }
    }
}
