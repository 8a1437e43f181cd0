use fracalign::initial::{Phase, Profile};
use fracalign_cli::config::{emit_config, parse_config};
use fracalign_cli::profile::parse_profile;
use proptest::prelude::*;

fn term() -> impl Strategy<Value = Profile> {
    prop_oneof![
        (-5.0..5.0f64).prop_map(Profile::Constant),
        (-1.0..1.0f64, 1u32..20, any::<bool>()).prop_map(|(amplitude, wavenumber, c)| {
            Profile::SingleMode {
                amplitude,
                wavenumber,
                phase: if c { Phase::Cos } else { Phase::Sin },
            }
        }),
        (-1.0..1.0f64, 0.1..50.0f64).prop_map(|(amplitude, sharpness)| Profile::SteepFront {
            amplitude,
            sharpness
        }),
        (0.0..1.0f64, 1u32..16)
            .prop_map(|(amplitude, modes)| Profile::RandomModes { amplitude, modes }),
    ]
}

fn profile() -> impl Strategy<Value = Profile> {
    prop::collection::vec(term(), 1..4).prop_map(|mut v| {
        if v.len() == 1 {
            v.pop().unwrap()
        } else {
            Profile::Sum(v)
        }
    })
}

proptest! {
    #[test]
    fn profile_text_round_trips(p in profile()) {
        prop_assert_eq!(parse_profile(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn emitted_config_is_a_fixed_point(
        kind in prop::sample::select(vec!["primitive", "reformulated", "special", "burgers"]),
        alpha in 0.01..0.99f64,
        half_n in 4usize..512,
        t_end in 0.1..100.0f64,
        seed in 0..=i64::MAX as u64,
        snaps in prop::collection::vec(0.0..0.1f64, 0..4),
    ) {
        let text = format!(
            "[model]\nkind = \"{kind}\"\nalpha = {alpha:?}\n[grid]\nn = {}\n[initial]\nseed = {seed}\n\
             [stepper]\nt_end = {t_end:?}\nsnapshot_times = {snaps:?}\n",
            2 * half_n
        );
        let c = parse_config(&text).unwrap();
        let emitted = emit_config(&c);
        let again = parse_config(&emitted).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert_eq!(emit_config(&again), emitted);
    }
}
