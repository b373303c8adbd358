#include "oqs/presets.hpp"

namespace oqs {

namespace {

struct PresetDef {
    PresetInfo info;
    const char* text;
};

const PresetDef kPresets[] = {
    {{"fig2_envbench",
      "qubit relaxing into M = 8 randomly detuned modes (5% spread); excitation trace with "
      "collapse and revival"},
     R"([experiment]
kind = envbench
output = fig2_envbench.csv

[envbench]
m = 8
omega = 1
gbar1 = 1e-3
rel_sigma = 0.05
seed = 1
rwa = true

[grid]
t1 = 20000
dt = 0.05
sample_every = 50
)"},
    {{"fig5_cavity_unravelings",
      "damped cavity from Fock |10>, 100 counting trajectories of <n> plus the ensemble "
      "average"},
     R"([experiment]
kind = trajectories
output = fig5_cavity_unravelings.csv

[model]
dims = 31
hamiltonian = n
jump = 1 a
initial = basis 10

[grid]
t1 = 5
dt = 2e-4
sample_every = 250

[scheme]
scheme = counting
n = 100
seed = 1

[observables]
obs = n
)"},
    {{"fig6_state_transfer",
      "two decaying qubits with a collective channel, from |e,g>; conditional no-jump branch "
      "relaxing into the singlet"},
     R"([experiment]
kind = trajectories
output = fig6_state_transfer.csv

[model]
dims = 2 2
jump = 0.05 sm1
jump = 0.05 sm2
jump = 1 0.7071067811865476*sm1 + 0.7071067811865476*sm2
initial = basis 0 1

[grid]
t1 = 6
dt = 1e-3
sample_every = 10

[scheme]
scheme = counting
n = 1
seed = 1
conditional_no_jump = true

[observables]
obs = sp1*sm1
obs = sp2*sm2
obs = 0.5*sp1*sm1 + 0.5*sp2*sm2 - sp1*sm1*sp2*sm2 - 0.5*sp1*sm2 - 0.5*sm1*sp2
)"},
    {{"fig3_qec_ratio",
      "three-qubit repetition code under bit flips: logical decay rate per cycle spacing tau "
      "vs the bare rate"},
     R"([experiment]
kind = qec
output = fig3_qec_ratio.csv

[qec]
gamma = 1
tau_list = 0.01 0.02 0.04 0.1 0.2
)"},
    {{"zeno_appendixA2",
      "cavity damped by repeated short ancilla interactions; fitted gamma_eff against g^2 tau"},
     R"([experiment]
kind = zeno
output = zeno_appendixA2.csv

[zeno]
g = 1
cutoff = 1
tau_list = 0.025 0.05 0.1
n_cycles = 8000
)"},
};

}  // namespace

const std::vector<PresetInfo>& preset_list() {
    static const std::vector<PresetInfo> list = [] {
        std::vector<PresetInfo> out;
        for (const auto& p : kPresets) out.push_back(p.info);
        return out;
    }();
    return list;
}

ConfigFile preset_config(const std::string& name) {
    for (const auto& p : kPresets)
        if (p.info.name == name) return parse_config_text(p.text, "<preset:" + name + ">");
    throw InvalidArgument("unknown preset '" + name + "'; see list-presets");
}

}  // namespace oqs
