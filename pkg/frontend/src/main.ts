import { ApiClient } from "./api.js";
import { renderSvg } from "./render.js";
import { CaseViewModel } from "./viewmodel.js";
import type { MutationOp, NodePayload } from "./types.js";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "";
const api = new ApiClient(apiBase);
const vm = new CaseViewModel(api);

const el = {
  caseSelect: document.getElementById("case-select") as HTMLSelectElement,
  revision: document.getElementById("revision")!,
  status: document.getElementById("status")!,
  graph: document.getElementById("graph")!,
  toasts: document.getElementById("toasts")!,
  actions: document.getElementById("actions")!,
  pending: document.getElementById("pending")!,
  commit: document.getElementById("commit") as HTMLButtonElement,
  revert: document.getElementById("revert") as HTMLButtonElement,
  hideDefeaters: document.getElementById("hide-defeaters") as HTMLButtonElement,
  empty: document.getElementById("empty-store")!,
  createCase: document.getElementById("create-case") as HTMLButtonElement,
};

function selectedNode(): NodePayload | null {
  if (!vm.document || !vm.selection) return null;
  return vm.document.case.nodes.find((n) => n.id === vm.selection) ?? null;
}

function actionButtons(): { label: string; op: MutationOp }[] {
  const node = selectedNode();
  if (!node) return [];
  const out: { label: string; op: MutationOp }[] = [];
  if (node.type === "defeater") {
    const next = node.status === "addressed" ? "active" : "addressed";
    out.push({
      label: next === "addressed" ? "Mark addressed" : "Reactivate",
      op: { op: "set_defeater_status", id: node.id, status: next },
    });
    if (node.status !== "residual_risk") {
      out.push({
        label: "Accept as residual risk",
        op: {
          op: "set_defeater_status",
          id: node.id,
          status: "residual_risk",
          justification: "accepted from the workbench",
        },
      });
    }
  }
  if (node.type === "evidence") {
    out.push({
      label: node.present === false ? "Mark evidence present" : "Mark evidence absent",
      op: { op: "set_evidence_present", id: node.id, present: node.present === false },
    });
  }
  if (node.type === "claim" || node.type === "external") {
    out.push({
      label: "Raise a doubt here",
      op: {
        op: "add_node",
        node: {
          type: "defeater",
          id: `doubt_${Date.now().toString(36)}`,
          text: "Something seems wrong here",
          target: node.id,
        },
      },
    });
  }
  return out;
}

function redraw(): void {
  el.revision.textContent = vm.revision >= 0 ? `revision ${vm.revision}` : "";
  const status = vm.previewStatus ?? vm.status;
  el.status.textContent = status ? (status.closed ? "closed" : "open") : "";
  el.status.className = status?.closed ? "closed" : "open";
  el.graph.innerHTML = renderSvg(vm);
  el.toasts.innerHTML = vm.toasts.map((t) => `<div class="toast">${t}</div>`).join("");
  el.pending.textContent = vm.pendingOps.length
    ? `${vm.pendingOps.length} pending what-if op(s) — preview shown dashed`
    : "";
  el.commit.disabled = vm.pendingOps.length === 0;
  el.revert.disabled = vm.pendingOps.length === 0;
  el.hideDefeaters.textContent = vm.defeatersHidden ? "Reveal defeaters" : "Hide defeaters";

  el.actions.innerHTML = "";
  for (const action of actionButtons()) {
    const button = document.createElement("button");
    button.textContent = action.label;
    button.addEventListener("click", async () => {
      await vm.queueWhatIf(action.op);
      redraw();
    });
    el.actions.appendChild(button);
  }

  for (const group of el.graph.querySelectorAll<SVGGElement>("[data-node-id]")) {
    group.addEventListener("click", () => {
      const id = group.dataset.nodeId!;
      const node = vm.document?.case.nodes.find((n) => n.id === id);
      if (node?.type === "defeater" && vm.selection === id) {
        vm.toggleCollapse(id);
      }
      vm.select(id);
      redraw();
    });
  }
}

async function refreshCaseList(): Promise<void> {
  const cases = await vm.listCases();
  el.empty.style.display = cases.length === 0 ? "block" : "none";
  el.caseSelect.innerHTML = cases
    .map((c) => `<option value="${c.id}">${c.id} (rev ${c.revision})</option>`)
    .join("");
  if (cases.length > 0) {
    await vm.loadCase(el.caseSelect.value);
  }
}

el.caseSelect.addEventListener("change", async () => {
  await vm.loadCase(el.caseSelect.value);
  redraw();
});

el.commit.addEventListener("click", async () => {
  await vm.commit();
  redraw();
});

el.revert.addEventListener("click", () => {
  vm.revert();
  redraw();
});

el.hideDefeaters.addEventListener("click", () => {
  vm.toggleAllDefeaters();
  redraw();
});

el.createCase.addEventListener("click", async () => {
  const name = prompt("Name for the new case?", "untitled") ?? "untitled";
  await api.createCase(name, {
    format_version: "1.0",
    case: {
      name,
      version: "1",
      top: "top",
      nodes: [
        {
          type: "claim",
          id: "top",
          text: "State the claim this case will argue",
          designation: "assumption",
          assumption_justification: "placeholder while the case is developed",
        },
      ],
      blocks: [],
    },
  });
  await refreshCaseList();
  redraw();
});

refreshCaseList()
  .then(redraw)
  .catch((error) => {
    vm.toast(`Cannot reach the server: ${String(error)}`);
    redraw();
  });
