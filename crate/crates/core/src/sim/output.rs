use std::io::{self, Write};

use serde::Serialize;

use super::{BlockResult, OutcomeClass, Stats, TraceResult};

pub const CSV_HEADER: &str = "p,strategy,n_blocks,errors_strict,BER,BER_lo,BER_hi,ANoI,exact,degenerate,nonequivalent,detected,seed";

/// One row per `(p, strategy)`. Unchecked blocks are counted as nonequivalent.
pub fn write_csv<W: Write>(mut w: W, stats: &[Stats]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in stats {
        let (lo, hi) = s.ber_interval();
        writeln!(
            w,
            "{},{},{},{},{:.8e},{:.8e},{:.8e},{:.6},{},{},{},{},{}",
            s.p,
            s.strategy,
            s.n_blocks,
            s.errors_strict(),
            s.ber(),
            lo,
            hi,
            s.anoi(),
            s.exact,
            s.degenerate,
            s.nonequivalent + s.unchecked,
            s.detected,
            s.seed
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BlockLine<'a> {
    p: f64,
    strategy: &'a str,
    block: usize,
    class: &'a str,
    converged: bool,
    initial_converged: bool,
    iterations: usize,
    adjustments: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e_out: Option<String>,
}

/// One JSON object per line and block.
pub fn write_block_log<W: Write>(mut w: W, blocks: &[BlockResult]) -> io::Result<()> {
    for b in blocks {
        let line = BlockLine {
            p: b.p,
            strategy: b.strategy.name(),
            block: b.block,
            class: OutcomeClass::name(b.class),
            converged: b.converged,
            initial_converged: b.initial_converged,
            iterations: b.iterations,
            adjustments: b.adjustments,
            error: b.error.as_ref().map(|e| e.to_string()),
            e_out: b.e_out.as_ref().map(|e| e.to_string()),
        };
        serde_json::to_writer(&mut w, &line)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Whitespace-separated columns `round iteration qubit I X Z Y hard`, one line
/// per qubit and iteration, with a blank line between rounds.
pub fn write_trajectory<W: Write>(mut w: W, trace: &TraceResult) -> io::Result<()> {
    writeln!(w, "# round iteration qubit I X Z Y hard")?;
    let mut last_round = None;
    for pt in &trace.points {
        if last_round.is_some_and(|r| r != pt.round) {
            writeln!(w)?;
        }
        last_round = Some(pt.round);
        for (q, (b, h)) in pt.beliefs.iter().zip(&pt.hard).enumerate() {
            writeln!(
                w,
                "{} {} {} {:.10e} {:.10e} {:.10e} {:.10e} {}",
                pt.round,
                pt.iteration,
                q,
                b[0],
                b[1],
                b[2],
                b[3],
                crate::gf4::PauliSymbol::from(*h).as_char()
            )?;
        }
    }
    Ok(())
}
