namespace starosc {}
