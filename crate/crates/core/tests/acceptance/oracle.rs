//! Brute-force re-implementation of the directional metrics, written from
//! the definitions with plain loops and no shared helpers.

pub fn moves(actual: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..actual.len() {
        out.push(actual[i] - actual[i - 1]);
    }
    out
}

/// +1 on a rise, -1 on a fall, repeat the last signal on no change (+1 at the start).
pub fn signals(predicted: &[f64]) -> Vec<i8> {
    let mut out: Vec<i8> = Vec::new();
    for i in 1..predicted.len() {
        let change = predicted[i] - predicted[i - 1];
        let s = if change > 0.0 {
            1
        } else if change < 0.0 {
            -1
        } else if i == 1 {
            1
        } else {
            out[i - 2]
        };
        out.push(s);
    }
    out
}

pub fn hit_pct(actual: &[f64], signals: &[i8]) -> f64 {
    let d = moves(actual);
    let mut hits = 0usize;
    for i in 0..d.len() {
        let hit = if d[i] == 0.0 {
            true
        } else if d[i] > 0.0 {
            signals[i] == 1
        } else {
            signals[i] == -1
        };
        if hit {
            hits += 1;
        }
    }
    100.0 * hits as f64 / d.len() as f64
}

/// `None` for a flat series.
pub fn efficiency_pct(actual: &[f64], signals: &[i8]) -> Option<f64> {
    let d = moves(actual);
    let mut realized = 0.0;
    let mut best = 0.0;
    for i in 0..d.len() {
        realized += signals[i] as f64 * d[i];
        best += d[i].abs();
    }
    if best == 0.0 {
        None
    } else {
        Some(100.0 * realized / best)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Srm {
    Flat,
    NoLoss,
    Value(f64),
}

pub fn srm(actual: &[f64], signals: &[i8]) -> Srm {
    let Some(eff) = efficiency_pct(actual, signals) else {
        return Srm::Flat;
    };
    let d = moves(actual);
    let mut losses = Vec::new();
    let mut abs_total = 0.0;
    for i in 0..d.len() {
        let r = signals[i] as f64 * d[i];
        if r < 0.0 {
            losses.push(-r);
        }
        abs_total += d[i].abs();
    }
    if losses.is_empty() {
        return Srm::NoLoss;
    }
    let mut loss_total = 0.0;
    for l in &losses {
        loss_total += l;
    }
    let avg_drawdown = loss_total / losses.len() as f64;
    let mean_move = abs_total / d.len() as f64;
    Srm::Value((eff / 100.0) / (avg_drawdown / mean_move))
}

/// Mean absolute error (EAM).
pub fn eam(actual: &[f64], predicted: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..actual.len() {
        total += (actual[i] - predicted[i]).abs();
    }
    total / actual.len() as f64
}

/// Root mean squared error (ECM).
pub fn ecm(actual: &[f64], predicted: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..actual.len() {
        total += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    }
    (total / actual.len() as f64).sqrt()
}

/// Strategy, perfect and buy-and-hold equity at each month after the first,
/// each point summed from scratch.
pub fn equity(actual: &[f64], signals: &[i8]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let d = moves(actual);
    let mut strategy = Vec::new();
    let mut perfect = Vec::new();
    let mut buy_hold = Vec::new();
    for t in 0..d.len() {
        let mut s = 0.0;
        let mut p = 0.0;
        for i in 0..=t {
            s += signals[i] as f64 * d[i];
            p += d[i].abs();
        }
        strategy.push(s);
        perfect.push(p);
        buy_hold.push(actual[t + 1] - actual[0]);
    }
    (strategy, perfect, buy_hold)
}
