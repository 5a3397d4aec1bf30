//! Command-line front end: code construction, encoding, decoding, flip-set
//! table generation, latency estimates, and FER simulation.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use fastscl::construction::{build_reliability, make_code_spec, CodeSpec, Crc};
use fastscl::latency::{LatencyModel, LatencyVariant};
use fastscl::mcs::{gen_mcs_r1, gen_mcs_spc, restrict_mcs};
use fastscl::scl::{DecodeConfig, DecoderVariant, ListDecoder, PmMode};
use fastscl::sim::{run_paired, SimConfig};
use fastscl::tree::{build_tree, census, NodePolicy};

#[derive(Parser)]
#[command(name = "fastscl", about = "Polar code toolbox with fast list decoding")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    CaScl,
    Fsl,
    FplF,
    FplP,
}

impl VariantArg {
    fn functional(self) -> DecoderVariant {
        match self {
            VariantArg::CaScl => DecoderVariant::CaScl,
            VariantArg::Fsl => DecoderVariant::Fsl,
            VariantArg::FplF | VariantArg::FplP => DecoderVariant::Fpl,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PmArg {
    Exact,
    Hwf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a code spec (JSON on stdout) from the Gaussian-approximation
    /// construction.
    Construct {
        /// Block length (power of two)
        #[arg(long)]
        n: usize,
        /// Payload bits
        #[arg(long)]
        k: usize,
        /// CRC bits
        #[arg(long, default_value_t = 8)]
        r: usize,
        /// Design SNR in dB
        #[arg(long, default_value_t = 2.0)]
        design_snr: f64,
    },
    /// Encode a payload (bit string) with the code spec.
    Encode {
        #[arg(long)]
        code: PathBuf,
        /// Payload as a string of 0/1; random if omitted
        #[arg(long)]
        payload: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decode channel LLRs (JSON array file) and print the result.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        llr: PathBuf,
        #[arg(long, default_value_t = 8)]
        list: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::FplF)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = PmArg::Exact)]
        pm: PmArg,
        #[arg(long)]
        tmax: Option<usize>,
        #[arg(long)]
        imax: Option<usize>,
        #[arg(long)]
        upsilon: Option<usize>,
    },
    /// Print the flip-set tables for a list size.
    McsGen {
        #[arg(long, default_value_t = 8)]
        list: usize,
        /// Which family: 0, 1 (parity classes) or r1
        #[arg(long, default_value = "0")]
        family: String,
        #[arg(long)]
        imax: Option<usize>,
    },
    /// Print the pruned node tree and step counts for every decoder
    /// generation.
    Latency {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = 8)]
        list: usize,
    },
    /// Measure FER over AWGN, optionally for several decoders on paired
    /// noise.
    Simulate {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = 8)]
        list: usize,
        #[arg(long)]
        ebn0: f64,
        #[arg(long, default_value_t = 10_000)]
        frames: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated decoder variants to run on the same noise
        #[arg(long, default_value = "fpl-f")]
        variants: String,
        #[arg(long, value_enum, default_value_t = PmArg::Exact)]
        pm: PmArg,
        #[arg(long)]
        tmax: Option<usize>,
    },
}

fn load_spec(path: &PathBuf) -> CodeSpec {
    let text = std::fs::read_to_string(path).expect("cannot read code spec");
    CodeSpec::from_json(&text).expect("invalid code spec")
}

fn crc_for(spec: &CodeSpec) -> Crc {
    match spec.r {
        0 => Crc::none(),
        8 => Crc::crc8_nr(),
        d => panic!("no default CRC of degree {d}; use r = 0 or 8"),
    }
}

fn decoder_cfg(
    list: usize,
    variant: VariantArg,
    pm: PmArg,
    tmax: Option<usize>,
    imax: Option<usize>,
    upsilon: Option<usize>,
) -> DecodeConfig {
    let mut cfg = DecodeConfig::new(list, variant.functional());
    cfg.pm_mode = match pm {
        PmArg::Exact => PmMode::Exact,
        PmArg::Hwf => PmMode::Hwf,
    };
    cfg.t_max = tmax;
    cfg.i_max = imax;
    cfg.upsilon = upsilon;
    cfg
}

fn main() {
    match Cli::parse().cmd {
        Cmd::Construct {
            n,
            k,
            r,
            design_snr,
        } => {
            assert!(n.is_power_of_two(), "block length must be a power of two");
            let seq = build_reliability(n.trailing_zeros(), design_snr);
            let spec = make_code_spec(n, k, r, &seq, &[]).expect("bad parameters");
            println!("{}", spec.to_json());
        }
        Cmd::Encode {
            code,
            payload,
            seed,
        } => {
            let spec = load_spec(&code);
            let crc = crc_for(&spec);
            let dec = ListDecoder::new(spec, crc, DecodeConfig::new(2, DecoderVariant::CaScl));
            let bits: Vec<u8> = match payload {
                Some(s) => s
                    .chars()
                    .map(|c| match c {
                        '0' => 0,
                        '1' => 1,
                        _ => panic!("payload must be 0/1"),
                    })
                    .collect(),
                None => {
                    use rand::{Rng, SeedableRng};
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    (0..dec.spec.k).map(|_| rng.gen_range(0..2)).collect()
                }
            };
            let x = dec.encode(&bits);
            let s: String = x.iter().map(|b| char::from(b'0' + b)).collect();
            println!("{s}");
        }
        Cmd::Decode {
            code,
            llr,
            list,
            variant,
            pm,
            tmax,
            imax,
            upsilon,
        } => {
            let spec = load_spec(&code);
            let crc = crc_for(&spec);
            let cfg = decoder_cfg(list, variant, pm, tmax, imax, upsilon);
            let dec = ListDecoder::new(spec, crc, cfg);
            let text = std::fs::read_to_string(&llr).expect("cannot read LLR file");
            let llrs: Vec<f64> = serde_json::from_str(&text).expect("LLR file must be a JSON array");
            let res = dec.decode(&llrs);
            let info: String = res.info.iter().map(|b| char::from(b'0' + b)).collect();
            println!(
                "{}",
                serde_json::json!({
                    "info": info,
                    "pm": res.pm,
                    "crc_ok": res.crc_ok,
                })
            );
        }
        Cmd::McsGen { list, family, imax } => {
            let sets = match family.as_str() {
                "0" => gen_mcs_spc(list, 0),
                "1" => gen_mcs_spc(list, 1),
                "r1" => gen_mcs_r1(list),
                other => panic!("unknown family {other}; use 0, 1 or r1"),
            };
            let sets = match imax {
                Some(im) => restrict_mcs(&sets, im),
                None => sets,
            };
            println!("{} sets", sets.len());
            for s in sets {
                println!("{s:?}");
            }
        }
        Cmd::Latency { code, list } => {
            let spec = load_spec(&code);
            let policy = NodePolicy::all();
            let tables = fastscl::mcs::McsTables::new(list.max(2).next_power_of_two());
            let tree = build_tree(&spec.indicator, &policy);
            println!("node census: {:?}", census(&tree));
            let model = LatencyModel::new(list, &policy, &tables);
            let base = model.total_steps(&spec.indicator, LatencyVariant::SotaTsp22);
            for v in LatencyVariant::ALL {
                let steps = model.total_steps(&spec.indicator, v);
                let red = 100.0 * (base - steps) / base;
                println!("{:12} {:8.1} steps  ({:+.1}% vs sota-tsp22)", v.name(), steps, -red);
            }
        }
        Cmd::Simulate {
            code,
            list,
            ebn0,
            frames,
            seed,
            variants,
            pm,
            tmax,
        } => {
            let spec = load_spec(&code);
            let crc = crc_for(&spec);
            let args: Vec<VariantArg> = variants
                .split(',')
                .map(|s| VariantArg::from_str(s.trim(), true).expect("bad variant"))
                .collect();
            let decoders: Vec<ListDecoder> = args
                .iter()
                .map(|&v| {
                    ListDecoder::new(
                        spec.clone(),
                        crc.clone(),
                        decoder_cfg(list, v, pm, tmax, None, None),
                    )
                })
                .collect();
            let refs: Vec<&ListDecoder> = decoders.iter().collect();
            let cfg = SimConfig::new(ebn0, frames, seed);
            let res = run_paired(&refs, &cfg);
            println!("frames: {}", res.frames);
            for (v, st) in args.iter().zip(res.per_decoder.iter()) {
                println!(
                    "{:8}: fer {:.4e}  ({} errors, 95% CI [{:.3e}, {:.3e}])",
                    format!("{:?}", v.functional()).to_lowercase(),
                    st.fer,
                    st.errors,
                    st.ci95.0,
                    st.ci95.1
                );
            }
            if args.len() > 1 {
                println!("frames with differing outputs: {}", res.disagreements);
            }
        }
    }
}
