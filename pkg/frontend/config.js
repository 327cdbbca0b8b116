// Single runtime config value: where the coordinator HTTP API lives.
window.MATHSEARCH_COORDINATOR = "http://127.0.0.1:8080";
