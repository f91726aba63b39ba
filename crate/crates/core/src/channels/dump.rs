use serde::{Deserialize, Serialize};

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64};

/// JSON form of a Kraus channel: each operator is a row-major list of
/// `[re, im]` pairs of shape `dim_out x dim_in`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelDump {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<Vec<[f64; 2]>>,
}

impl ChannelDump {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch
                .kraus()
                .iter()
                .map(|k| k.as_slice().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    /// Rebuilds the channel, inferring trace preservation from completeness.
    pub fn to_channel(&self) -> Result<KrausChannel> {
        let ops = self
            .kraus
            .iter()
            .map(|entries| {
                let data = entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
                CMatrix::from_vec(self.dim_out, self.dim_in, data)
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::InvalidChannel("dump has no Kraus operators".into()));
        }
        KrausChannel::infer(ops)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing_incoherent, Branch};
    use proptest::prelude::*;

    #[test]
    fn depolarizing_dump_round_trip() {
        let ch = depolarizing_incoherent(0.5, Branch::A).unwrap().to_kraus();
        let dump = ChannelDump::from_channel(&ch);
        let text = dump.to_json().unwrap();
        let back = ChannelDump::from_json(&text).unwrap();
        assert_eq!(back, dump);
        let rebuilt = back.to_channel().unwrap();
        assert!(rebuilt.is_trace_preserving());
        assert_eq!(rebuilt.kraus(), ch.kraus());
    }

    #[test]
    fn malformed_dump_rejected() {
        let dump = ChannelDump {
            dim_in: 2,
            dim_out: 2,
            kraus: vec![vec![[1.0, 0.0]; 3]],
        };
        assert!(dump.to_channel().is_err());
        assert!(ChannelDump::from_json("{\"dim_in\": 2}").is_err());
    }

    proptest! {
        #[test]
        fn dyadic_entries_round_trip_bit_exact(
            entries in proptest::collection::vec((-64i32..=64, -64i32..=64), 4),
            exp in 0i32..20,
        ) {
            let scale = 2f64.powi(-exp);
            let dump = ChannelDump {
                dim_in: 2,
                dim_out: 2,
                kraus: vec![entries.iter().map(|&(a, b)| [a as f64 * scale, b as f64 * scale]).collect()],
            };
            let back = ChannelDump::from_json(&dump.to_json().unwrap()).unwrap();
            for (x, y) in back.kraus[0].iter().zip(&dump.kraus[0]) {
                prop_assert_eq!(x[0].to_bits(), y[0].to_bits());
                prop_assert_eq!(x[1].to_bits(), y[1].to_bits());
            }
        }
    }
}
