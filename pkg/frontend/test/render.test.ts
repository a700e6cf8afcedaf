import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { VERDICT_COLORS } from "../src/colors.js";
import { layoutCase } from "../src/layout.js";
import { renderSvg } from "../src/render.js";
import { CaseViewModel } from "../src/viewmodel.js";
import { FakeServer, fixtureDocument } from "./fakeserver.js";

async function loadedViewModel(): Promise<{ server: FakeServer; vm: CaseViewModel }> {
  const server = new FakeServer();
  const vm = new CaseViewModel(new ApiClient("http://server", server.fetch));
  await vm.loadCase("lightbulb");
  return { server, vm };
}

describe("layout", () => {
  it("places defeaters beside their targets", () => {
    const layout = layoutCase(fixtureDocument());
    const byId = new Map(layout.nodes.map((n) => [n.id, n]));
    const defeater = byId.get("d_insufficient")!;
    const target = byId.get("cases_complete")!;
    expect(defeater.y).toBe(target.y); // same row
    expect(defeater.x).toBeGreaterThan(target.x); // to the side
  });

  it("keeps support below parents and is deterministic", () => {
    const doc = fixtureDocument();
    const layout = layoutCase(doc);
    const byId = new Map(layout.nodes.map((n) => [n.id, n]));
    expect(byId.get("top")!.y).toBeLessThan(byId.get("b_decomp")!.y);
    expect(byId.get("b_decomp")!.y).toBeLessThan(byId.get("bulb_ok")!.y);
    expect(layoutCase(doc)).toEqual(layout);
  });

  it("emits a defeat edge per targeted defeater", () => {
    const layout = layoutCase(fixtureDocument());
    const defeats = layout.edges.filter((e) => e.kind === "defeat");
    expect(defeats).toContainEqual({
      from: "d_insufficient",
      to: "cases_complete",
      kind: "defeat",
    });
    expect(defeats).toContainEqual({ from: "d_long_life", to: "wears_out", kind: "defeat" });
  });
});

describe("renderSvg", () => {
  it("draws every visible node with its server-verdict fill", async () => {
    const { vm } = await loadedViewModel();
    const svg = renderSvg(vm);
    expect(svg).toContain('data-node-id="top"');
    expect(svg).toContain('data-node-id="b_decomp"');
    const wearsLine = svg.split("\n").find((l) => l.includes('data-node-id="wears_out"'))!;
    expect(wearsLine).toContain(VERDICT_COLORS.FALSE);
    const ledLine = svg.split("\n").find((l) => l.includes('data-node-id="led_bulb"'))!;
    expect(ledLine).toContain(VERDICT_COLORS.TRUE);
  });

  it("shows the verdict legend", async () => {
    const { vm } = await loadedViewModel();
    const svg = renderSvg(vm);
    expect(svg).toContain('data-legend="true"');
    for (const color of Object.values(VERDICT_COLORS)) {
      expect(svg).toContain(color);
    }
  });

  it("marks previewed nodes with distinct (dashed) styling", async () => {
    const { server, vm } = await loadedViewModel();
    server.nextDelta = { top: "TRUE" };
    await vm.queueWhatIf({
      op: "set_defeater_status",
      id: "d_insufficient",
      status: "addressed",
    });
    const svg = renderSvg(vm);
    const topLine = svg.split("\n").find((l) => l.includes('data-node-id="top"'))!;
    expect(topLine).toContain("stroke-dasharray");
    expect(topLine).toContain(VERDICT_COLORS.TRUE);
  });

  it("tints defeater subcases and drops them when hidden", async () => {
    const { vm } = await loadedViewModel();
    expect(renderSvg(vm)).toContain('data-subcase-of="d_insufficient"');
    vm.toggleAllDefeaters();
    const svg = renderSvg(vm);
    expect(svg).not.toContain('data-node-id="d_insufficient"');
    expect(svg).not.toContain('data-node-id="wears_out"');
    expect(svg).toContain('data-node-id="top"');
  });

  it("renders inline errors at the offending node", async () => {
    const { server, vm } = await loadedViewModel();
    server.failNextWhatIf = { status: 422, detail: "'ev_fma' cannot be retargeted" };
    await vm.queueWhatIf({ op: "retarget_defeater", id: "ev_fma", target: "top" });
    const svg = renderSvg(vm);
    expect(svg).toContain('data-error-for="ev_fma"');
  });
});
