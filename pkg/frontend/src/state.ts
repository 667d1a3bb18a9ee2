import { ViewName, VIEWS } from "./api.js";

/** UI state; every mutation goes through the helpers so invariants hold:
 * the selected view is always one of the five server views, and both diff
 * panes always reference views of the same (selected) module. */
export interface ViewState {
  packageId: string | null;
  modules: string[];
  selectedModule: string | null;
  selectedView: ViewName;
  diffLeft: ViewName;
  diffRight: ViewName;
  progress: { done: number; total: number };
  jobState: string;
}

export function initialState(): ViewState {
  return {
    packageId: null,
    modules: [],
    selectedModule: null,
    selectedView: "decompiled",
    diffLeft: "low_level",
    diffRight: "decompiled",
    progress: { done: 0, total: 0 },
    jobState: "idle",
  };
}

function assertView(view: string): ViewName {
  if (!(VIEWS as readonly string[]).includes(view)) {
    throw new Error(`unknown view: ${view}`);
  }
  return view as ViewName;
}

export function withPackage(state: ViewState, packageId: string, modules: string[]): ViewState {
  return {
    ...state,
    packageId,
    modules,
    selectedModule: modules[0] ?? null,
    jobState: "complete",
  };
}

export function selectModule(state: ViewState, module: string): ViewState {
  if (!state.modules.includes(module)) {
    throw new Error(`unknown module: ${module}`);
  }
  return { ...state, selectedModule: module };
}

export function selectView(state: ViewState, view: string): ViewState {
  return { ...state, selectedView: assertView(view) };
}

export function selectDiff(state: ViewState, left: string, right: string): ViewState {
  return { ...state, diffLeft: assertView(left), diffRight: assertView(right) };
}

export function withProgress(state: ViewState, done: number, total: number, jobState: string): ViewState {
  // progress never runs backwards even if polls race
  const monotoneDone = Math.max(state.progress.done, done);
  return { ...state, progress: { done: monotoneDone, total }, jobState };
}
