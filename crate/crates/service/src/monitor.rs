// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Process resource sampling and gateway traffic accounting.
//!
//! CPU and resident memory come from `/proc/self`; where that is missing the
//! fields are `null`. Network counters are the bytes the gateway itself read
//! and wrote: request and status lines, headers, and bodies.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Instant;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

pub const COMPONENT: &str = "gateway";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceSample {
    pub timestamp: DateTime<Utc>,
    pub component: String,
    pub cpu_percent: Option<f64>,
    pub mem_bytes: Option<u64>,
    pub net_rx_bytes: u64,
    pub net_tx_bytes: u64,
}

/// Cumulative byte counters fed by the gateway.
#[derive(Debug, Default)]
pub struct NetMeter {
    rx: AtomicU64,
    tx: AtomicU64,
}

impl NetMeter {
    pub fn record_rx(&self, n: u64) {
        self.rx.fetch_add(n, Ordering::Relaxed);
    }

    pub fn record_tx(&self, n: u64) {
        self.tx.fetch_add(n, Ordering::Relaxed);
    }

    pub fn rx(&self) -> u64 {
        self.rx.load(Ordering::Relaxed)
    }

    pub fn tx(&self) -> u64 {
        self.tx.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, Copy)]
struct CpuReading {
    ticks: u64,
    at: Instant,
}

fn page_size() -> u64 {
    // SAFETY: sysconf has no preconditions.
    let v = unsafe { libc::sysconf(libc::_SC_PAGESIZE) };
    if v > 0 {
        v as u64
    } else {
        4096
    }
}

fn clock_ticks() -> u64 {
    // SAFETY: sysconf has no preconditions.
    let v = unsafe { libc::sysconf(libc::_SC_CLK_TCK) };
    if v > 0 {
        v as u64
    } else {
        100
    }
}

/// utime + stime of this process, in clock ticks.
fn cpu_ticks() -> Option<u64> {
    let stat = std::fs::read_to_string("/proc/self/stat").ok()?;
    // The command name may contain spaces; fields resume after the last ')'.
    let rest = &stat[stat.rfind(')')? + 2..];
    let fields: Vec<&str> = rest.split_whitespace().collect();
    let utime: u64 = fields.get(11)?.parse().ok()?;
    let stime: u64 = fields.get(12)?.parse().ok()?;
    Some(utime + stime)
}

/// Resident set size in bytes.
pub fn resident_bytes() -> Option<u64> {
    let statm = std::fs::read_to_string("/proc/self/statm").ok()?;
    let pages: u64 = statm.split_whitespace().nth(1)?.parse().ok()?;
    Some(pages * page_size())
}

pub struct Monitor {
    capacity: usize,
    meter: Arc<NetMeter>,
    ring: RwLock<VecDeque<ResourceSample>>,
    last_cpu: Mutex<Option<CpuReading>>,
    ticks_per_s: u64,
}

impl Monitor {
    pub fn new(capacity: usize, meter: Arc<NetMeter>) -> Monitor {
        assert!(capacity > 0, "ring capacity must be positive");
        let m = Monitor {
            capacity,
            meter,
            ring: RwLock::new(VecDeque::with_capacity(capacity)),
            last_cpu: Mutex::new(None),
            ticks_per_s: clock_ticks(),
        };
        *m.last_cpu.lock().unwrap() = cpu_ticks().map(|ticks| CpuReading { ticks, at: Instant::now() });
        m
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn meter(&self) -> &Arc<NetMeter> {
        &self.meter
    }

    /// CPU use since the previous reading, as a percentage of one core.
    fn cpu_percent(&self) -> Option<f64> {
        let now = CpuReading {
            ticks: cpu_ticks()?,
            at: Instant::now(),
        };
        let mut last = self.last_cpu.lock().unwrap();
        let prev = last.replace(now)?;
        let secs = now.at.duration_since(prev.at).as_secs_f64();
        if secs <= 0.0 {
            return Some(0.0);
        }
        let used = now.ticks.saturating_sub(prev.ticks) as f64 / self.ticks_per_s as f64;
        Some((100.0 * used / secs).max(0.0))
    }

    /// Reads the process statistics without recording them.
    pub fn sample_now(&self) -> ResourceSample {
        ResourceSample {
            timestamp: Utc::now(),
            component: COMPONENT.into(),
            cpu_percent: self.cpu_percent(),
            mem_bytes: resident_bytes(),
            net_rx_bytes: self.meter.rx(),
            net_tx_bytes: self.meter.tx(),
        }
    }

    /// Takes a sample and appends it to the ring, evicting the oldest when
    /// full. Timestamps are forced strictly increasing.
    pub fn tick(&self) -> ResourceSample {
        let mut sample = self.sample_now();
        let mut ring = self.ring.write().unwrap();
        if let Some(last) = ring.back() {
            if sample.timestamp <= last.timestamp {
                sample.timestamp = last.timestamp + Duration::microseconds(1);
            }
        }
        if ring.len() == self.capacity {
            ring.pop_front();
        }
        ring.push_back(sample.clone());
        sample
    }

    /// Samples from the last `seconds`, oldest first.
    pub fn window(&self, seconds: f64) -> Vec<ResourceSample> {
        let ring = self.ring.read().unwrap();
        let span = Duration::microseconds((seconds * 1e6).min(i64::MAX as f64 / 2.0) as i64);
        let cutoff = Utc::now().checked_sub_signed(span).unwrap_or(DateTime::<Utc>::MIN_UTC);
        ring.iter().filter(|s| s.timestamp >= cutoff).cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.ring.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
