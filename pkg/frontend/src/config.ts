/**
 * Where the voiceage service lives.
 *
 * Defaults to the page's own origin, which covers serving dist/ behind
 * the same host as the API. A deployment that splits the two sets
 * window.VOICEAGE_API_BASE before loading the app module.
 */

declare global {
  interface Window {
    VOICEAGE_API_BASE?: string;
  }
}

export function apiBase(): string {
  if (typeof window !== "undefined" && window.VOICEAGE_API_BASE) {
    return window.VOICEAGE_API_BASE.replace(/\/$/, "");
  }
  return "";
}
