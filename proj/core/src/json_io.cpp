namespace projflow {}
