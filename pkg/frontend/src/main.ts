import { ApiClient, isValidPackageId, UploadModule, VIEWS } from "./api.js";
import { diffLines } from "./diff.js";
import { submitAndPoll } from "./poll.js";
import {
  initialState,
  selectDiff,
  selectModule,
  selectView,
  ViewState,
  withPackage,
  withProgress,
} from "./state.js";
import {
  functionNames,
  renderCodePane,
  renderDiffTable,
  renderFunctionList,
  renderModuleList,
  renderProgress,
} from "./render.js";

const api = new ApiClient(window.location.origin);
let state: ViewState = initialState();
let polling = false; // at most one in-flight poll loop

const $ = (id: string) => document.getElementById(id)!;

function setStatus(text: string, isError = false): void {
  const el = $("status");
  el.textContent = text;
  el.className = isError ? "status error" : "status";
}

function update(next: ViewState): void {
  state = next;
  $("progress-slot").innerHTML = renderProgress(
    state.progress.done,
    state.progress.total,
    state.jobState,
  );
  $("module-list").innerHTML = renderModuleList(state.modules, state.selectedModule);
  for (const view of VIEWS) {
    const tab = document.querySelector(`[data-view-tab="${view}"]`);
    tab?.classList.toggle("selected", view === state.selectedView);
  }
}

async function refreshViewPane(): Promise<void> {
  if (!state.packageId || !state.selectedModule) return;
  const text = await api.view(state.packageId, state.selectedModule, state.selectedView);
  $("view-pane").innerHTML = renderCodePane(text);
  if (state.selectedView === "decompiled") {
    $("function-list").innerHTML = renderFunctionList(functionNames(text));
  }
}

async function refreshDiffPane(): Promise<void> {
  if (!state.packageId || !state.selectedModule) return;
  const [left, right] = await Promise.all([
    api.view(state.packageId, state.selectedModule, state.diffLeft),
    api.view(state.packageId, state.selectedModule, state.diffRight),
  ]);
  $("diff-pane").innerHTML = renderDiffTable(diffLines(left, right));
}

async function submit(fn: () => Promise<import("./api.js").Job>): Promise<void> {
  if (polling) return;
  polling = true;
  setStatus("submitting…");
  try {
    const job = await submitAndPoll(api, fn, {
      onProgress: (j) =>
        update(withProgress(state, j.progress.done, j.progress.total, j.state)),
    });
    const modules = await api.modules(job.package_id);
    update(withPackage(state, job.package_id, modules));
    setStatus("complete");
    await refreshViewPane();
    await refreshDiffPane();
  } catch (err) {
    setStatus(String(err), true);
  } finally {
    polling = false;
  }
}

function wire(): void {
  $("submit-id").addEventListener("click", () => {
    const id = ($("package-id") as HTMLInputElement).value.trim();
    if (!isValidPackageId(id)) {
      setStatus("package id must be 0x followed by 64 hex chars", true);
      return; // no request storm on bad input
    }
    void submit(() => api.submitPackage(id));
  });

  $("submit-files").addEventListener("click", () => {
    const lowLevel = ($("low-level-text") as HTMLTextAreaElement).value;
    const disassembly = ($("disassembly-text") as HTMLTextAreaElement).value;
    if (!lowLevel.trim()) {
      setStatus("paste the low-level module text first", true);
      return;
    }
    const module: UploadModule = { low_level: lowLevel };
    if (disassembly.trim()) module.disassembly = disassembly;
    void submit(() => api.submitUploads([module]));
  });

  $("view-tabs").addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-view-tab]");
    if (!target) return;
    update(selectView(state, target.getAttribute("data-view-tab")!));
    void refreshViewPane();
  });

  $("module-list").addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-module]");
    if (!target) return;
    update(selectModule(state, target.getAttribute("data-module")!));
    void refreshViewPane();
    void refreshDiffPane();
  });

  for (const side of ["left", "right"] as const) {
    const select = $(`diff-${side}`) as HTMLSelectElement;
    select.innerHTML = VIEWS.map((v) => `<option value="${v}">${v}</option>`).join("");
    select.value = side === "left" ? state.diffLeft : state.diffRight;
    select.addEventListener("change", () => {
      update(
        selectDiff(
          state,
          ($("diff-left") as HTMLSelectElement).value,
          ($("diff-right") as HTMLSelectElement).value,
        ),
      );
      void refreshDiffPane();
    });
  }

  $("function-list").addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest("button.redecompile");
    if (!button || !state.packageId || !state.selectedModule) return;
    const fn = button.getAttribute("data-function")!;
    void (async () => {
      setStatus(`re-decompiling ${fn}…`);
      try {
        const job = await api.redecompile(state.packageId!, state.selectedModule!, fn);
        await submitAndPoll(api, () => Promise.resolve(job), {
          onProgress: (j) =>
            update(withProgress(state, j.progress.done, j.progress.total, j.state)),
        });
        setStatus(`re-decompiled ${fn}`);
        // only the decompiled view changes
        update(selectView(state, "decompiled"));
        await refreshViewPane();
        await refreshDiffPane();
      } catch (err) {
        setStatus(String(err), true); // state unchanged on e.g. UnknownFunction
      }
    })();
  });
}

wire();
update(state);
