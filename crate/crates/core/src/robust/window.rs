use std::collections::VecDeque;

use rand::RngCore;

use crate::error::{BanditError, Result};
use crate::mab::{check_arms, check_delta, confidence_width};
use crate::policy::{Context, Policy};
use crate::util::argmax;

/// Per-arm rewards from the most recent `window` rounds.
#[derive(Debug, Clone)]
pub struct WindowStats {
    window: usize,
    buffers: Vec<VecDeque<(usize, f64)>>,
    sums: Vec<f64>,
}

impl WindowStats {
    pub fn new(k: usize, window: usize) -> Result<Self> {
        check_arms(k)?;
        if window == 0 {
            return Err(BanditError::invalid("window length must be at least 1"));
        }
        Ok(Self {
            window,
            buffers: vec![VecDeque::new(); k],
            sums: vec![0.0; k],
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn record(&mut self, arm: usize, t: usize, reward: f64) {
        self.buffers[arm].push_back((t, reward));
        self.sums[arm] += reward;
    }

    /// Drops every observation with round `<= t - window`.
    pub fn advance_to(&mut self, t: usize) {
        let Some(cutoff) = t.checked_sub(self.window) else {
            return;
        };
        for (buf, sum) in self.buffers.iter_mut().zip(&mut self.sums) {
            while let Some(&(s, r)) = buf.front() {
                if s > cutoff {
                    break;
                }
                buf.pop_front();
                *sum -= r;
            }
            if buf.is_empty() {
                *sum = 0.0;
            }
        }
    }

    pub fn count(&self, arm: usize) -> usize {
        self.buffers[arm].len()
    }

    pub fn mean(&self, arm: usize) -> Option<f64> {
        let n = self.count(arm);
        (n > 0).then(|| self.sums[arm] / n as f64)
    }

    pub fn clear(&mut self) {
        self.buffers.iter_mut().for_each(VecDeque::clear);
        self.sums.iter_mut().for_each(|s| *s = 0.0);
    }
}

/// Windowed mean plus the UCB bonus on the windowed count; `+inf` if the arm
/// has no observation in the window.
pub fn sw_ucb_index(window: &WindowStats, arm: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(match window.mean(arm) {
        None => f64::INFINITY,
        Some(m) => m + confidence_width(window.count(arm), delta),
    })
}

#[derive(Debug, Clone)]
pub struct SlidingWindowUcb {
    stats: WindowStats,
    delta: f64,
}

impl SlidingWindowUcb {
    pub fn new(k: usize, window: usize, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(Self {
            stats: WindowStats::new(k, window)?,
            delta,
        })
    }

    pub fn stats(&self) -> &WindowStats {
        &self.stats
    }
}

impl Policy for SlidingWindowUcb {
    fn name(&self) -> String {
        "sw_ucb".into()
    }

    fn select(&mut self, t: usize, _ctx: &Context, _rng: &mut dyn RngCore) -> usize {
        self.stats.advance_to(t);
        let idx: Vec<f64> = (0..self.stats.buffers.len())
            .map(|a| sw_ucb_index(&self.stats, a, self.delta).expect("delta validated"))
            .collect();
        argmax(&idx)
    }

    fn update(&mut self, t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        self.stats.record(arm, t, reward);
        Ok(())
    }

    fn reset(&mut self) {
        self.stats.clear();
    }
}
